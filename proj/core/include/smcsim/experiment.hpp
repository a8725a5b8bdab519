#pragma once

// Experiment harness: run every controller of a scenario, score the runs,
// tune gains with the swarm and persist the results.
//
// Every file written here starts with comment lines carrying the toolkit
// version, the seed and the fully resolved scenario, so a run can be
// reproduced from any one of its outputs.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smcsim/error.hpp"
#include "smcsim/metrics.hpp"
#include "smcsim/mpso.hpp"
#include "smcsim/scenario.hpp"
#include "smcsim/trajectory.hpp"

namespace smcsim {

/// Outcome of one controller on one scenario. A failed run keeps the error
/// instead of a trajectory.
struct ControllerRun {
  ControllerSpec controller;
  std::optional<Trajectory> trajectory;
  std::optional<MetricReport> metrics;
  std::optional<ErrorKind> failure;
  std::string failure_message;
  std::optional<double> failure_time;

  bool ok() const noexcept { return !failure.has_value(); }
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ControllerRun> runs;  // same order as spec.controllers
};

/// Simulates one controller; simulation errors are captured in the result,
/// configuration errors propagate.
ControllerRun run_controller(const Scenario& scenario, const ControllerSpec& controller);
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// "# "-less header lines: version, seed, then the resolved scenario.
std::vector<std::string> provenance_lines(const ExperimentSpec& spec);

/// Flat JSON object with every metric and its convention. Missing timings are
/// written as "not-reached"; failed runs carry status "diverged" or the error kind.
std::string metrics_json(const ExperimentSpec& spec, const ControllerRun& run);

/// Columns controller,kind,status,rise_time,settling_time,ise,chattering,
/// steady_state_error,lyapunov_violations; rows in controller order.
std::string comparison_csv(const ExperimentResult& result);

/// Writes resolved.scn, comparison.csv, <label>.csv and <label>.json into
/// `dir`, returning the paths written. Throws IoError.
std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result,
                                                    const std::filesystem::path& dir);

/// ISE of the controller with `names` replaced by `values`; +inf when the
/// candidate is invalid or the run fails.
double ise_objective(const Scenario& scenario, const ControllerSpec& base,
                     const std::vector<std::string>& names, std::span<const double> values);

struct TuningResult {
  ExperimentSpec spec;          // as given
  ExperimentSpec tuned;         // target controller replaced by the best candidate
  std::vector<double> initial;  // target parameters before tuning
  OptimizeResult search;
  ControllerRun before;
  ControllerRun after;
};

/// Throws TuningFailed when no candidate produced a finite ISE.
TuningResult run_tuning(const ExperimentSpec& spec);

/// iteration,best_fitness,mean_fitness
std::string trace_csv(const ExperimentSpec& spec, const std::vector<TraceRow>& trace);

/// Writes trace.csv, tuned.scn, before/after metrics and trajectories, and a
/// tuning.json summary into `dir`.
std::vector<std::filesystem::path> write_tuning(const TuningResult& result,
                                                const std::filesystem::path& dir);

/// Selected channels as CSV columns. Throws ConfigError for an empty or
/// unknown channel list.
void emit_plot_data(std::ostream& os, const Trajectory& traj,
                    const std::vector<std::string>& channels,
                    const std::vector<std::string>& comments = {});

/// The standard figure set for one run: output, error, control, surface and
/// phase portrait, as <stem>_<figure>.csv in `dir`.
std::vector<std::filesystem::path> emit_standard_figures(
    const Trajectory& traj, const std::filesystem::path& dir, const std::string& stem,
    const std::vector<std::string>& comments = {});

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace smcsim
