#pragma once

// Sliding surfaces, reaching laws and the assembled control laws.
//
// Sign convention: e = y_ref - y. For a plant y^(n) = f + g u + d and the PID
// surface s = kp e + kd e_dot + ki int(e), the surface derivative is affine in
// the control, s_dot = drift + input_gain * u - top_gain * d, with
// top_gain = kd (second order) or kp (first order, kd = 0). Every control law
// below is obtained by solving s_dot = target for u; the closed-loop identity
// tests enforce this rather than any particular printed sign.

#include <cstddef>
#include <string>
#include <string_view>

#include "smcsim/dynamics.hpp"

namespace smcsim {

/// |input_gain| below this aborts the run with ControlSingularity.
inline constexpr double kControlSingularityFloor = 1e-9;

struct SurfaceGains {
  double kp = 1.0;
  double ki = 1.0;
  double kd = 0.0;  // 0 selects the PI surface

  void validate() const;
};

enum class ReachingLaw {
  proposed,              // s_dot = -k s - k_sc |s|^power sat(s)
  constant_exponential,  // s_dot = -k s - k_sc sign(s)
};

struct ReachingParams {
  ReachingLaw law = ReachingLaw::proposed;
  double k = 35.0;               // linear (exponential) rate, 1/s
  double switching_gain = 1.5;   // k_sc
  double power = 0.5;            // alpha in [0, 2]
  double layer_width = 0.05;     // boundary layer half-width

  void validate() const;
  /// Lyapunov decrease with a matched disturbance needs k_sc > d_max.
  bool switching_dominates(double disturbance_bound) const noexcept {
    return switching_gain > disturbance_bound;
  }
};

/// Tracking error and reference derivatives at one sample.
struct ErrorFrame {
  double e = 0.0;
  double e_dot = 0.0;
  double e_int = 0.0;
  double ref_d1 = 0.0;
  double ref_d2 = 0.0;
};

double surface(const SurfaceGains& gains, const ErrorFrame& frame);

double sign_fn(double s) noexcept;
double sat_fn(double s, double width) noexcept;

double reaching_rate(const ReachingParams& params, double s);

/// s_dot = drift + input_gain * u for the nominal plant (d = 0).
struct SurfaceDynamics {
  double drift = 0.0;
  double input_gain = 0.0;
};

SurfaceDynamics surface_dynamics(const SurfaceGains& gains, const ErrorFrame& frame,
                                 const AffineTerms& plant, std::size_t order = 2);

/// Control that makes s_dot = 0 for the nominal plant.
double equivalent_control(const SurfaceGains& gains, const ErrorFrame& frame,
                          const AffineTerms& plant, std::size_t order = 2);

/// Control that makes s_dot equal reaching_rate(params, s) for the nominal
/// plant, for whichever law `params.law` names.
double reaching_law_control(const SurfaceGains& gains, const ReachingParams& params,
                            const ErrorFrame& frame, const AffineTerms& plant,
                            std::size_t order = 2);

/// PID surface with the power-rate exponential reaching law.
double proposed_control(const SurfaceGains& gains, const ReachingParams& params,
                        const ErrorFrame& frame, const AffineTerms& plant,
                        std::size_t order = 2);

/// Classical first-order SMC, s = e_dot + lambda e. Requires a second-order plant.
double first_order_surface(double lambda, const ErrorFrame& frame);
double first_order_smc_control(double lambda, double switching_gain, const ErrorFrame& frame,
                               const AffineTerms& plant, double layer_width,
                               bool use_sign = false);

/// Parallel PID on the tracking error.
double pid_control(const SurfaceGains& gains, const ErrorFrame& frame);

/// -(k_sc / input_gain) sign(s), where input_gain is the gain from u into s_dot
/// so that its contribution to s_dot is -k_sc sign(s).
double switching_control(double switching_gain, double input_gain, double s);

// ---------------------------------------------------------------------------
// Controller blocks as named in scenario files
// ---------------------------------------------------------------------------

enum class ControllerKind { pid, smc1, pid_smc_eq, pid_smc_proposed };

std::string_view to_string(ControllerKind kind) noexcept;
/// Throws ConfigError on unknown names.
ControllerKind parse_controller_kind(std::string_view name);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::pid_smc_proposed;
  std::string label;
  SurfaceGains gains;
  /// Reaching law for the PID-SMC variants; smc1 uses switching_gain and
  /// layer_width only. The law is implied by `kind`.
  ReachingParams reaching;
  double lambda = 5.0;    // smc1 surface slope
  bool use_sign = false;  // smc1: raw sign instead of sat

  void validate() const;
  /// Whether the controller reads e_dot (and so needs a second-order plant).
  bool needs_output_rate() const noexcept;
  /// Reaching parameters with the law set from `kind`.
  ReachingParams effective_reaching() const noexcept;
};

struct ControlOutput {
  double u = 0.0;
  double s = 0.0;
};

double sliding_value(const ControllerSpec& spec, const ErrorFrame& frame);

ControlOutput compute_control(const ControllerSpec& spec, const ErrorFrame& frame,
                              const AffineTerms& plant, std::size_t order);

}  // namespace smcsim
