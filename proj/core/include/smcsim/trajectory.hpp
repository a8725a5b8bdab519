#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smcsim {

/// Uniformly sampled closed-loop record. Every channel has size() samples.
struct Trajectory {
  std::vector<std::string> state_names;
  std::vector<double> t;
  std::vector<std::vector<double>> state;  // one vector per state coordinate
  std::vector<double> ref;
  std::vector<double> e;
  std::vector<double> e_dot;
  std::vector<double> e_int;
  std::vector<double> s;
  std::vector<double> u;
  std::vector<double> d;

  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }
  double dt() const noexcept { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  std::span<const double> output() const { return state.front(); }

  void reserve(std::size_t n);

  /// `t`, the state names, then `ref,e,edot,eint,s,u,d`.
  std::vector<std::string> channel_names() const;
  /// Throws ConfigError for names not in channel_names().
  std::span<const double> channel(std::string_view name) const;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Comment lines are written first, each prefixed with "# ".
void write_columns_csv(std::ostream& os, const std::vector<std::string>& comments,
                       const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& comments = {});

/// Reads a file produced by write_trajectory_csv; '#' lines are skipped.
Trajectory read_trajectory_csv(std::istream& is);

}  // namespace smcsim
