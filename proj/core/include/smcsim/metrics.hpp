#pragma once

// Trajectory metrics. Conventions (declared in every report):
//  - rise time: time for the deviation |y - target| to fall from 90 % to 10 %
//    of the initial deviation, crossings linearly interpolated between samples;
//  - settling time: earliest time after which the deviation stays inside
//    max(band_fraction * initial deviation, 1e-4) until the end of the record;
//  - steady-state error and chattering: over the final 20 % of the horizon.

#include <cstddef>
#include <optional>
#include <span>

#include "smcsim/trajectory.hpp"

namespace smcsim {

inline constexpr double kSettlingBand = 0.02;
inline constexpr double kSettlingFloor = 1e-4;
inline constexpr double kTailFraction = 0.2;

/// nullopt when the 10 % level is never reached. Times are relative, so a
/// shifted time axis gives the same answer.
std::optional<double> rise_time(std::span<const double> t, std::span<const double> y,
                                double initial, double target);
std::optional<double> rise_time(const Trajectory& traj, double initial, double target);

/// Measured from t.front(). nullopt if the deviation is outside the band at
/// the final sample.
std::optional<double> settling_time(std::span<const double> t, std::span<const double> y,
                                    double target, double band_fraction = kSettlingBand);
std::optional<double> settling_time(const Trajectory& traj, double target,
                                    double band_fraction = kSettlingBand);

/// Trapezoidal integral of e^2 over samples [first, last].
double integral_squared(std::span<const double> t, std::span<const double> e,
                        std::size_t first, std::size_t last);
double ise(const Trajectory& traj);

/// Index of the first sample in the final `fraction` of the horizon.
std::size_t tail_start(std::span<const double> t, double fraction = kTailFraction);

double steady_state_error(const Trajectory& traj);

/// Mean |u[n+1] - u[n]| over the final 20 % of the horizon.
double chattering_amplitude(std::span<const double> t, std::span<const double> u);
double chattering_amplitude(const Trajectory& traj);

struct LyapunovAudit {
  std::size_t violations = 0;
  std::optional<double> worst_margin;  // max V_dot over violating samples
};

/// V = s^2 / 2, V_dot by central differences (one-sided at the ends).
/// A violation is a sample with |s| > layer_width and V_dot >= 0.
LyapunovAudit lyapunov_audit(std::span<const double> t, std::span<const double> s,
                             double layer_width);
LyapunovAudit lyapunov_audit(const Trajectory& traj, double layer_width);

struct MetricReport {
  std::optional<double> rise_time;
  std::optional<double> settling_time;
  double ise = 0.0;
  double steady_state_error = 0.0;
  double chattering = 0.0;
  std::size_t lyapunov_violations = 0;
  std::optional<double> lyapunov_worst_margin;
};

/// Timing metrics are taken on the tracking error (target 0), which equals
/// |y - ref| for constant references.
MetricReport evaluate(const Trajectory& traj, double layer_width);

}  // namespace smcsim
