#include "smcsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "smcsim/error.hpp"

namespace smcsim {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("metric channels differ in length");
}

/// First time the deviation drops to `level`, interpolated.
std::optional<double> first_crossing(std::span<const double> t, std::span<const double> y,
                                     double target, double level) {
  double prev = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dev = std::abs(y[i] - target);
    if (dev <= level) {
      if (i == 0) return t[0];
      const double frac = (prev - level) / (prev - dev);
      return t[i - 1] + frac * (t[i] - t[i - 1]);
    }
    prev = dev;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> rise_time(std::span<const double> t, std::span<const double> y,
                                double initial, double target) {
  require_same_length(t, y);
  const double dev0 = std::abs(initial - target);
  if (dev0 == 0.0) return 0.0;
  if (y.empty()) return std::nullopt;
  const auto t90 = first_crossing(t, y, target, 0.9 * dev0);
  const auto t10 = first_crossing(t, y, target, 0.1 * dev0);
  if (!t10 || !t90) return std::nullopt;
  return *t10 - *t90;
}

std::optional<double> rise_time(const Trajectory& traj, double initial, double target) {
  return rise_time(traj.t, traj.output(), initial, target);
}

std::optional<double> settling_time(std::span<const double> t, std::span<const double> y,
                                    double target, double band_fraction) {
  require_same_length(t, y);
  if (!(band_fraction > 0.0)) throw ConfigError("settling band fraction must be > 0");
  if (y.empty()) return std::nullopt;
  const double band = std::max(band_fraction * std::abs(y.front() - target), kSettlingFloor);

  std::size_t last_out = y.size();
  for (std::size_t i = y.size(); i-- > 0;) {
    if (std::abs(y[i] - target) > band) {
      last_out = i;
      break;
    }
  }
  if (last_out == y.size()) return 0.0;
  if (last_out + 1 == y.size()) return std::nullopt;
  const double a = std::abs(y[last_out] - target);
  const double b = std::abs(y[last_out + 1] - target);
  const double frac = (a - band) / (a - b);
  return t[last_out] + frac * (t[last_out + 1] - t[last_out]) - t.front();
}

std::optional<double> settling_time(const Trajectory& traj, double target,
                                    double band_fraction) {
  return settling_time(traj.t, traj.output(), target, band_fraction);
}

double integral_squared(std::span<const double> t, std::span<const double> e,
                        std::size_t first, std::size_t last) {
  require_same_length(t, e);
  if (e.empty() || first >= last) return 0.0;
  last = std::min(last, e.size() - 1);
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    sum += 0.5 * (e[i] * e[i] + e[i + 1] * e[i + 1]) * (t[i + 1] - t[i]);
  }
  return sum;
}

double ise(const Trajectory& traj) {
  if (traj.empty()) return 0.0;
  return integral_squared(traj.t, traj.e, 0, traj.size() - 1);
}

std::size_t tail_start(std::span<const double> t, double fraction) {
  if (t.empty()) return 0;
  const double cut = t.back() - fraction * (t.back() - t.front());
  const double tol = 1e-9 * (t.size() > 1 ? t[1] - t[0] : 1.0);
  const auto it = std::lower_bound(t.begin(), t.end(), cut - tol);
  return static_cast<std::size_t>(it - t.begin());
}

double steady_state_error(const Trajectory& traj) {
  if (traj.empty()) return 0.0;
  const std::size_t first = tail_start(traj.t);
  double sum = 0.0;
  for (std::size_t i = first; i < traj.size(); ++i) sum += std::abs(traj.e[i]);
  return sum / static_cast<double>(traj.size() - first);
}

double chattering_amplitude(std::span<const double> t, std::span<const double> u) {
  require_same_length(t, u);
  if (u.size() < 2) return 0.0;
  const std::size_t first = std::min(tail_start(t), u.size() - 2);
  double sum = 0.0;
  for (std::size_t i = first; i + 1 < u.size(); ++i) sum += std::abs(u[i + 1] - u[i]);
  return sum / static_cast<double>(u.size() - 1 - first);
}

double chattering_amplitude(const Trajectory& traj) {
  return chattering_amplitude(traj.t, traj.u);
}

LyapunovAudit lyapunov_audit(std::span<const double> t, std::span<const double> s,
                             double layer_width) {
  require_same_length(t, s);
  LyapunovAudit audit;
  const std::size_t n = s.size();
  if (n < 2) return audit;
  const auto v = [&s](std::size_t i) { return 0.5 * s[i] * s[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    const double v_dot = (v(hi) - v(lo)) / (t[hi] - t[lo]);
    if (std::abs(s[i]) > layer_width && v_dot >= 0.0) {
      ++audit.violations;
      audit.worst_margin = std::max(audit.worst_margin.value_or(v_dot), v_dot);
    }
  }
  return audit;
}

LyapunovAudit lyapunov_audit(const Trajectory& traj, double layer_width) {
  return lyapunov_audit(traj.t, traj.s, layer_width);
}

MetricReport evaluate(const Trajectory& traj, double layer_width) {
  MetricReport r;
  if (traj.empty()) return r;
  r.rise_time = smcsim::rise_time(traj.t, traj.e, traj.e.front(), 0.0);
  r.settling_time = smcsim::settling_time(traj.t, traj.e, 0.0);
  r.ise = smcsim::ise(traj);
  r.steady_state_error = smcsim::steady_state_error(traj);
  r.chattering = chattering_amplitude(traj);
  const LyapunovAudit audit = lyapunov_audit(traj, layer_width);
  r.lyapunov_violations = audit.violations;
  r.lyapunov_worst_margin = audit.worst_margin;
  return r;
}

}  // namespace smcsim
