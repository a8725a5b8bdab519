#include "smcsim/smc.hpp"

#include <cmath>

namespace smcsim {

namespace {

void require_nonsingular(double input_gain) {
  if (!(std::abs(input_gain) >= kControlSingularityFloor)) {
    throw ControlSingularity("control input gain below singularity floor");
  }
}

}  // namespace

void SurfaceGains::validate() const {
  if (!(kp > 0.0) || !(ki > 0.0) || !(kd >= 0.0) || !std::isfinite(kp) ||
      !std::isfinite(ki) || !std::isfinite(kd)) {
    throw ConfigError("surface gains need kp > 0, ki > 0, kd >= 0");
  }
}

void ReachingParams::validate() const {
  if (!(k > 0.0) || !(switching_gain > 0.0) || !(power >= 0.0 && power <= 2.0) ||
      !(layer_width > 0.0) || !std::isfinite(k) || !std::isfinite(switching_gain) ||
      !std::isfinite(layer_width)) {
    throw ConfigError(
        "reaching parameters need k > 0, k_sc > 0, 0 <= alpha <= 2, delta > 0");
  }
}

double surface(const SurfaceGains& gains, const ErrorFrame& frame) {
  return gains.kp * frame.e + gains.kd * frame.e_dot + gains.ki * frame.e_int;
}

double sign_fn(double s) noexcept {
  if (s > 0.0) return 1.0;
  if (s < 0.0) return -1.0;
  return 0.0;
}

double sat_fn(double s, double width) noexcept {
  if (s > width) return 1.0;
  if (s < -width) return -1.0;
  return s / width;
}

double reaching_rate(const ReachingParams& params, double s) {
  switch (params.law) {
    case ReachingLaw::proposed:
      return -params.k * s -
             params.switching_gain * std::pow(std::abs(s), params.power) *
                 sat_fn(s, params.layer_width);
    case ReachingLaw::constant_exponential:
      return -params.k * s - params.switching_gain * sign_fn(s);
  }
  return 0.0;
}

SurfaceDynamics surface_dynamics(const SurfaceGains& gains, const ErrorFrame& frame,
                                 const AffineTerms& plant, std::size_t order) {
  if (order == 2) {
    return {gains.ki * frame.e + gains.kp * frame.e_dot +
                gains.kd * (frame.ref_d2 - plant.drift),
            -gains.kd * plant.input_gain};
  }
  // First order: s = kp e + ki int(e), e_dot = ref_d1 - (f + g u).
  return {gains.ki * frame.e + gains.kp * (frame.ref_d1 - plant.drift),
          -gains.kp * plant.input_gain};
}

double equivalent_control(const SurfaceGains& gains, const ErrorFrame& frame,
                          const AffineTerms& plant, std::size_t order) {
  const SurfaceDynamics sd = surface_dynamics(gains, frame, plant, order);
  require_nonsingular(sd.input_gain);
  return -sd.drift / sd.input_gain;
}

double reaching_law_control(const SurfaceGains& gains, const ReachingParams& params,
                            const ErrorFrame& frame, const AffineTerms& plant,
                            std::size_t order) {
  const SurfaceDynamics sd = surface_dynamics(gains, frame, plant, order);
  require_nonsingular(sd.input_gain);
  const double s = surface(gains, frame);
  return (reaching_rate(params, s) - sd.drift) / sd.input_gain;
}

double proposed_control(const SurfaceGains& gains, const ReachingParams& params,
                        const ErrorFrame& frame, const AffineTerms& plant,
                        std::size_t order) {
  ReachingParams p = params;
  p.law = ReachingLaw::proposed;
  return reaching_law_control(gains, p, frame, plant, order);
}

double first_order_surface(double lambda, const ErrorFrame& frame) {
  return frame.e_dot + lambda * frame.e;
}

double first_order_smc_control(double lambda, double switching_gain, const ErrorFrame& frame,
                               const AffineTerms& plant, double layer_width, bool use_sign) {
  require_nonsingular(plant.input_gain);
  const double s = first_order_surface(lambda, frame);
  const double sw = use_sign ? sign_fn(s) : sat_fn(s, layer_width);
  return (frame.ref_d2 - plant.drift + lambda * frame.e_dot + switching_gain * sw) /
         plant.input_gain;
}

double pid_control(const SurfaceGains& gains, const ErrorFrame& frame) {
  return gains.kp * frame.e + gains.ki * frame.e_int + gains.kd * frame.e_dot;
}

double switching_control(double switching_gain, double input_gain, double s) {
  require_nonsingular(input_gain);
  return -(switching_gain / input_gain) * sign_fn(s);
}

std::string_view to_string(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::pid: return "pid";
    case ControllerKind::smc1: return "smc1";
    case ControllerKind::pid_smc_eq: return "pid_smc_eq";
    case ControllerKind::pid_smc_proposed: return "pid_smc_proposed";
  }
  return "unknown";
}

ControllerKind parse_controller_kind(std::string_view name) {
  if (name == "pid") return ControllerKind::pid;
  if (name == "smc1") return ControllerKind::smc1;
  if (name == "pid_smc_eq") return ControllerKind::pid_smc_eq;
  if (name == "pid_smc_proposed") return ControllerKind::pid_smc_proposed;
  throw ConfigError("unknown controller '" + std::string(name) + "'");
}

void ControllerSpec::validate() const {
  switch (kind) {
    case ControllerKind::pid:
      gains.validate();
      break;
    case ControllerKind::smc1:
      if (!(lambda > 0.0) || !(reaching.switching_gain > 0.0) || !(reaching.layer_width > 0.0)) {
        throw ConfigError("smc1 needs lambda > 0, k_sc > 0, delta > 0");
      }
      break;
    case ControllerKind::pid_smc_eq:
    case ControllerKind::pid_smc_proposed:
      gains.validate();
      reaching.validate();
      break;
  }
}

bool ControllerSpec::needs_output_rate() const noexcept {
  return kind == ControllerKind::smc1 || gains.kd != 0.0;
}

ReachingParams ControllerSpec::effective_reaching() const noexcept {
  ReachingParams p = reaching;
  p.law = kind == ControllerKind::pid_smc_eq ? ReachingLaw::constant_exponential
                                             : ReachingLaw::proposed;
  return p;
}

double sliding_value(const ControllerSpec& spec, const ErrorFrame& frame) {
  if (spec.kind == ControllerKind::smc1) return first_order_surface(spec.lambda, frame);
  return surface(spec.gains, frame);
}

ControlOutput compute_control(const ControllerSpec& spec, const ErrorFrame& frame,
                              const AffineTerms& plant, std::size_t order) {
  const double s = sliding_value(spec, frame);
  switch (spec.kind) {
    case ControllerKind::pid:
      return {pid_control(spec.gains, frame), s};
    case ControllerKind::smc1:
      return {first_order_smc_control(spec.lambda, spec.reaching.switching_gain, frame, plant,
                                      spec.reaching.layer_width, spec.use_sign),
              s};
    case ControllerKind::pid_smc_eq: {
      // u = u_eq + u_sw, the switching part realising -k s - k_sc sign(s).
      const SurfaceDynamics sd = surface_dynamics(spec.gains, frame, plant, order);
      const double u_eq = equivalent_control(spec.gains, frame, plant, order);
      const double u_sw = -spec.reaching.k * s / sd.input_gain +
                          switching_control(spec.reaching.switching_gain, sd.input_gain, s);
      return {u_eq + u_sw, s};
    }
    case ControllerKind::pid_smc_proposed:
      return {proposed_control(spec.gains, spec.reaching, frame, plant, order), s};
  }
  return {0.0, s};
}

}  // namespace smcsim
