#include "smcsim/dynamics.hpp"

#include <numbers>
#include <sstream>

namespace smcsim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::degenerate_parameters: return "degenerate_parameters";
    case ErrorKind::control_singularity: return "control_singularity";
    case ErrorKind::simulation_diverged: return "simulation_diverged";
    case ErrorKind::tuning_failed: return "tuning_failed";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

void PendulumParams::validate() const {
  if (!(cart_mass > 0.0) || !(bob_mass > 0.0) || !(inertia >= 0.0) || !(length > 0.0) ||
      !(gravity > 0.0) || !(friction >= 0.0)) {
    throw DegenerateParameters("pendulum parameters out of range");
  }
  const double ml = bob_mass * length;
  if (!(ml * ml < inertia + ml * length)) {
    throw DegenerateParameters(
        "pendulum denominator m^2 l^2 cos^2(theta) - (I + m l^2) can vanish");
  }
}

double pendulum_denominator(double theta, const PendulumParams& p) {
  const double ml = p.bob_mass * p.length;
  const double c = std::cos(theta);
  return ml * ml * c * c - (p.inertia + ml * p.length);
}

AffineTerms pendulum_f_g(double theta, double theta_dot, const PendulumParams& p,
                         double denominator_floor) {
  const double den = pendulum_denominator(theta, p);
  if (std::abs(den) < denominator_floor) {
    throw DegenerateParameters("pendulum dynamics denominator below floor");
  }
  const double ml = p.bob_mass * p.length;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {
      (ml * p.gravity * s - ml * ml * c * s * theta_dot * theta_dot) / den,
      ml * c / den,
  };
}

double pendulum_rotational_accel(double theta, const PendulumParams& p) {
  const double ml = p.bob_mass * p.length;
  return -ml * p.gravity * std::sin(theta) / (p.inertia + ml * p.length);
}

double pendulum_rotational_energy(double theta, double theta_dot, const PendulumParams& p) {
  const double ml = p.bob_mass * p.length;
  return 0.5 * (p.inertia + ml * p.length) * theta_dot * theta_dot -
         ml * p.gravity * std::cos(theta);
}

void TankParams::validate() const {
  if (!(top_radius > 0.0) || !(max_height > 0.0) || !(discharge_coeff > 0.0) ||
      !(max_inflow > 0.0) || !(level_floor > 0.0) || !(level_floor < max_height)) {
    throw DegenerateParameters("tank parameters out of range");
  }
}

double tank_area(double level, const TankParams& p) {
  const double ratio = level / p.max_height;
  return std::numbers::pi * p.top_radius * p.top_radius * ratio * ratio;
}

TankRate tank_rate(double level, double inflow, const TankParams& p, double leak_coeff) {
  TankRate out;
  double h = level;
  if (h <= p.level_floor) {
    h = p.level_floor;
    out.floor_active = true;
  }
  const double area = tank_area(h, p);
  const double root = std::sqrt(h);
  out.input_gain = 1.0 / area;
  out.drift = -p.discharge_coeff * root / area;
  out.rate = (inflow - (p.discharge_coeff + leak_coeff) * root) / area;
  return out;
}

AffineTerms vdp_f_g(const StateVector& x) {
  return {-2.0 * x[0] + 3.0 * (1.0 - x[0] * x[0]) * x[1], 1.0};
}

StateVector vdp_rate(const StateVector& x, double u, double d) {
  const AffineTerms a = vdp_f_g(x);
  return {x[1], a.drift + a.input_gain * u + d};
}

void validate(const DisturbanceSpec& spec) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SinusoidDisturbance>) {
          if (!(d.amplitude >= 0.0) || !std::isfinite(d.angular_freq)) {
            throw ConfigError("sinusoid disturbance needs amplitude >= 0");
          }
        } else if constexpr (std::is_same_v<T, ImpulseDisturbance>) {
          if (!std::isfinite(d.area) || !std::isfinite(d.onset_time)) {
            throw ConfigError("impulse disturbance needs a finite area and onset");
          }
        } else if constexpr (std::is_same_v<T, LeakDisturbance>) {
          if (!(d.coefficient >= 0.0) || !std::isfinite(d.onset_time)) {
            throw ConfigError("leak disturbance needs coefficient >= 0");
          }
        }
      },
      spec);
}

double eval_disturbance(const DisturbanceSpec& spec, double t, double dt) {
  return std::visit(
      [t, dt](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SinusoidDisturbance>) {
          return d.amplitude * std::sin(d.angular_freq * t);
        } else if constexpr (std::is_same_v<T, ImpulseDisturbance>) {
          // Half-open window [onset, onset + dt) with a small tolerance so that
          // grid times n*dt hit exactly one sample.
          const double tol = 1e-9 * dt;
          return (t >= d.onset_time - tol && t < d.onset_time + dt - tol) ? d.area / dt : 0.0;
        } else {
          return 0.0;
        }
      },
      spec);
}

double leak_coefficient_at(const DisturbanceSpec& spec, double t) {
  if (const auto* leak = std::get_if<LeakDisturbance>(&spec)) {
    return t >= leak->onset_time ? leak->coefficient : 0.0;
  }
  return 0.0;
}

std::string describe(const DisturbanceSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NoDisturbance>) {
          os << "none";
        } else if constexpr (std::is_same_v<T, SinusoidDisturbance>) {
          os << d.amplitude << "*sin(" << d.angular_freq << "*t)";
        } else if constexpr (std::is_same_v<T, ImpulseDisturbance>) {
          os << "impulse(area=" << d.area << ", onset=" << d.onset_time << ")";
        } else {
          os << "leak(coefficient=" << d.coefficient << ", onset=" << d.onset_time << ")";
        }
      },
      spec);
  return os.str();
}

ReferenceSample eval_reference(const ReferenceSpec& spec, double t) {
  return std::visit(
      [t](const auto& r) -> ReferenceSample {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantReference>) {
          return {r.value, 0.0, 0.0};
        } else {
          const double w = r.angular_freq;
          return {r.offset + r.amplitude * std::sin(w * t),
                  r.amplitude * w * std::cos(w * t),
                  -r.amplitude * w * w * std::sin(w * t)};
        }
      },
      spec);
}

}  // namespace smcsim
