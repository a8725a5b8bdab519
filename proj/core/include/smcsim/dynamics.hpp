#pragma once

// Plant equations, disturbance and reference signals, and the fixed-step
// integrator. Everything here is a pure function of its arguments.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>

#include "smcsim/error.hpp"

namespace smcsim {

/// Largest plant order handled by the toolkit (pendulum, Van der Pol).
inline constexpr std::size_t kMaxOrder = 2;

using StateVector = std::array<double, kMaxOrder>;

struct PlantState {
  StateVector x{};
  double t = 0.0;
};

/// Control-affine decomposition of the highest output derivative:
/// y^(n) = drift + input_gain * u + d.
struct AffineTerms {
  double drift = 0.0;
  double input_gain = 0.0;
};

// ---------------------------------------------------------------------------
// Inverted pendulum (cart position not simulated)
// ---------------------------------------------------------------------------

struct PendulumParams {
  double cart_mass = 1.0;    // kg
  double bob_mass = 0.1;     // kg
  double inertia = 0.006;    // kg m^2
  double length = 0.3;       // m
  double gravity = 9.8;      // m/s^2
  double friction = 0.0;     // N s/m

  /// Throws DegenerateParameters when the invariants are broken, including
  /// m^2 l^2 >= I + m l^2 (the dynamics denominator could vanish).
  void validate() const;
};

/// Denominator of the pendulum acceleration, m^2 l^2 cos^2(theta) - (I + m l^2).
double pendulum_denominator(double theta, const PendulumParams& p);

/// theta_dd = drift + input_gain * u + d for the cart force u.
/// Throws DegenerateParameters when |denominator| < denominator_floor.
AffineTerms pendulum_f_g(double theta, double theta_dot, const PendulumParams& p,
                         double denominator_floor = 1e-12);

/// Rotational subsystem with the cart frozen: (I + m l^2) theta_dd = -m g l sin(theta).
double pendulum_rotational_accel(double theta, const PendulumParams& p);
/// Conserved quantity of pendulum_rotational_accel.
double pendulum_rotational_energy(double theta, double theta_dot, const PendulumParams& p);

// ---------------------------------------------------------------------------
// Conical tank, units cm and s
// ---------------------------------------------------------------------------

inline constexpr double kTankLevelFloor = 0.1;  // cm

/// Litres per hour to cm^3/s.
constexpr double lph_to_cm3_per_s(double lph) { return lph * 1000.0 / 3600.0; }

struct TankParams {
  double top_radius = 17.5;                          // cm
  double max_height = 70.0;                          // cm
  double discharge_coeff = 55.0;                     // cm^2.5/s
  double max_inflow = lph_to_cm3_per_s(400.0);       // cm^3/s
  double level_floor = kTankLevelFloor;              // cm

  void validate() const;
};

struct TankRate {
  double rate = 0.0;         // dh/dt, cm/s
  double drift = 0.0;        // -k sqrt(h) / A
  double input_gain = 0.0;   // 1 / A
  bool floor_active = false;
};

/// Cross-section area at level h, pi R^2 h^2 / H^2.
double tank_area(double level, const TankParams& p);

/// dh/dt = (F_in - (k + leak) sqrt(h)) / A(h). Levels at or below the floor
/// are evaluated at the floor. `drift` excludes the leak (it is unknown to the
/// controller).
TankRate tank_rate(double level, double inflow, const TankParams& p,
                   double leak_coeff = 0.0);

// ---------------------------------------------------------------------------
// Van der Pol oscillator
// ---------------------------------------------------------------------------

AffineTerms vdp_f_g(const StateVector& x);
StateVector vdp_rate(const StateVector& x, double u, double d);

// ---------------------------------------------------------------------------
// Disturbances
// ---------------------------------------------------------------------------

struct NoDisturbance {};

struct SinusoidDisturbance {
  double amplitude = 0.0;
  double angular_freq = 1.0;
};

/// Dirac impulse of the given area, discretised as one sample of height area/dt.
struct ImpulseDisturbance {
  double area = 0.0;
  double onset_time = 0.0;
};

/// Extra tank outflow coefficient * sqrt(h), active from onset_time on.
struct LeakDisturbance {
  double coefficient = 0.0;
  double onset_time = 0.0;
};

using DisturbanceSpec =
    std::variant<NoDisturbance, SinusoidDisturbance, ImpulseDisturbance, LeakDisturbance>;

void validate(const DisturbanceSpec& spec);

/// Additive disturbance at sample time t. Leaks contribute 0 here; see
/// leak_coefficient_at.
double eval_disturbance(const DisturbanceSpec& spec, double t, double dt);

double leak_coefficient_at(const DisturbanceSpec& spec, double t);

std::string describe(const DisturbanceSpec& spec);

// ---------------------------------------------------------------------------
// References
// ---------------------------------------------------------------------------

struct ConstantReference {
  double value = 0.0;
};

/// offset + amplitude * sin(angular_freq * t)
struct SinusoidReference {
  double amplitude = 0.0;
  double angular_freq = 1.0;
  double offset = 0.0;
};

using ReferenceSpec = std::variant<ConstantReference, SinusoidReference>;

struct ReferenceSample {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

ReferenceSample eval_reference(const ReferenceSpec& spec, double t);

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

/// Classical fourth-order Runge-Kutta step. `deriv(t, x)` must return a
/// std::array<double, N>; the input is held constant by the caller's closure.
/// Throws SimulationDiverged if any stage derivative is non-finite.
template <std::size_t N, class Deriv>
std::array<double, N> rk4_step(Deriv&& deriv, const std::array<double, N>& x,
                               double t, double dt) {
  const auto check = [t](const std::array<double, N>& k) {
    for (double v : k) {
      if (!std::isfinite(v)) {
        throw SimulationDiverged("non-finite state derivative", t);
      }
    }
    return k;
  };
  const auto axpy = [](const std::array<double, N>& a, double h,
                       const std::array<double, N>& b) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + h * b[i];
    return out;
  };

  const double half = 0.5 * dt;
  const auto k1 = check(deriv(t, x));
  const auto k2 = check(deriv(t + half, axpy(x, half, k1)));
  const auto k3 = check(deriv(t + half, axpy(x, half, k2)));
  const auto k4 = check(deriv(t + dt, axpy(x, dt, k3)));

  std::array<double, N> next{};
  for (std::size_t i = 0; i < N; ++i) {
    next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(next[i])) {
      throw SimulationDiverged("non-finite state after integration step", t + dt);
    }
  }
  return next;
}

}  // namespace smcsim
