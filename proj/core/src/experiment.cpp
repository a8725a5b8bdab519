#include "smcsim/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smcsim/version.hpp"

namespace smcsim {

namespace {

using nlohmann::ordered_json;

constexpr const char* kNotReached = "not-reached";

std::string status_of(const ControllerRun& run) {
  if (run.ok()) return "ok";
  if (*run.failure == ErrorKind::simulation_diverged) return "diverged";
  return std::string(to_string(*run.failure));
}

std::string timing_text(const std::optional<double>& v) {
  return v ? format_double(*v) : kNotReached;
}

ordered_json timing_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(kNotReached);
}

/// Largest |d(t)| for the additive disturbances; nullopt when unbounded or
/// not an additive signal.
std::optional<double> disturbance_bound(const DisturbanceSpec& d) {
  if (std::holds_alternative<NoDisturbance>(d)) return 0.0;
  if (const auto* s = std::get_if<SinusoidDisturbance>(&d)) return std::abs(s->amplitude);
  return std::nullopt;
}

std::string with_comments(const std::vector<std::string>& comments, const std::string& body) {
  std::string out;
  for (const auto& line : comments) out += "# " + line + "\n";
  return out + body;
}

std::string trajectory_text(const Trajectory& traj, const std::vector<std::string>& comments) {
  std::ostringstream os;
  write_trajectory_csv(os, traj, comments);
  return os.str();
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ControllerRun run_controller(const Scenario& scenario, const ControllerSpec& controller) {
  ControllerRun run;
  run.controller = controller;
  try {
    run.trajectory = simulate(scenario, controller);
    run.metrics = evaluate(*run.trajectory, controller.reaching.layer_width);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    run.trajectory.reset();
    run.metrics.reset();
    run.failure = err.kind();
    run.failure_message = err.what();
    run.failure_time = err.time();
  }
  return run;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result{spec, {}};
  result.runs.reserve(spec.controllers.size());
  for (const auto& c : spec.controllers) result.runs.push_back(run_controller(spec.scenario, c));
  return result;
}

std::vector<std::string> provenance_lines(const ExperimentSpec& spec) {
  std::vector<std::string> lines{
      "smcsim " + std::string(kVersion),
      "seed " + std::to_string(spec.scenario.seed),
      "config:",
  };
  std::istringstream config(serialize(to_config(spec)));
  for (std::string line; std::getline(config, line);) lines.push_back("  " + line);
  return lines;
}

std::string metrics_json(const ExperimentSpec& spec, const ControllerRun& run) {
  const ControllerSpec& c = run.controller;
  ordered_json j;
  j["toolkit_version"] = kVersion;
  j["seed"] = spec.scenario.seed;
  j["scenario"] = spec.scenario.name;
  j["controller"] = c.label;
  j["kind"] = to_string(c.kind);
  j["status"] = status_of(run);
  if (run.ok()) {
    const MetricReport& m = *run.metrics;
    j["rise_time"] = timing_json(m.rise_time);
    j["settling_time"] = timing_json(m.settling_time);
    j["ise"] = m.ise;
    j["steady_state_error"] = m.steady_state_error;
    j["chattering"] = m.chattering;
    j["lyapunov_violations"] = m.lyapunov_violations;
    j["lyapunov_worst_margin"] =
        m.lyapunov_worst_margin ? ordered_json(*m.lyapunov_worst_margin) : ordered_json(nullptr);
  } else {
    j["error"] = to_string(*run.failure);
    j["message"] = run.failure_message;
    j["failure_time"] = run.failure_time ? ordered_json(*run.failure_time) : ordered_json(nullptr);
  }
  const auto bound = disturbance_bound(spec.scenario.disturbance);
  j["disturbance_bound"] = bound ? ordered_json(*bound) : ordered_json(nullptr);
  j["switching_gain_exceeds_disturbance_bound"] =
      bound ? ordered_json(c.reaching.switching_dominates(*bound)) : ordered_json(nullptr);
  j["rise_time_convention"] = "90% to 10% of the initial error, interpolated crossings";
  j["settling_time_convention"] = "last exit from max(2% of initial error, 1e-4), from t0";
  j["steady_state_error_convention"] = "mean |e| over the final 20% of the horizon";
  j["chattering_convention"] = "mean |u[n+1] - u[n]| over the final 20% of the horizon";
  j["lyapunov_convention"] = "V = s^2/2, central differences, |s| > boundary layer";
  j["config"] = serialize(to_config(spec));
  return j.dump(2) + "\n";
}

std::string comparison_csv(const ExperimentResult& result) {
  std::string out = with_comments(provenance_lines(result.spec), "");
  out +=
      "controller,kind,status,rise_time,settling_time,ise,chattering,steady_state_error,"
      "lyapunov_violations\n";
  for (const auto& run : result.runs) {
    out += run.controller.label + "," + std::string(to_string(run.controller.kind)) + "," +
           status_of(run);
    if (run.ok()) {
      const MetricReport& m = *run.metrics;
      out += "," + timing_text(m.rise_time) + "," + timing_text(m.settling_time) + "," +
             format_double(m.ise) + "," + format_double(m.chattering) + "," +
             format_double(m.steady_state_error) + "," + std::to_string(m.lyapunov_violations);
    } else {
      out += ",,,,,,";
    }
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result,
                                                    const std::filesystem::path& dir) {
  const auto lines = provenance_lines(result.spec);
  std::vector<std::filesystem::path> written;
  const auto put = [&](const std::string& name, const std::string& text) {
    write_text_file(dir / name, text);
    written.push_back(dir / name);
  };
  put("resolved.scn", with_comments({lines[0], lines[1]}, serialize(to_config(result.spec))));
  put("comparison.csv", comparison_csv(result));
  for (const auto& run : result.runs) {
    if (run.trajectory) put(run.controller.label + ".csv", trajectory_text(*run.trajectory, lines));
    put(run.controller.label + ".json", metrics_json(result.spec, run));
  }
  return written;
}

double ise_objective(const Scenario& scenario, const ControllerSpec& base,
                     const std::vector<std::string>& names, std::span<const double> values) {
  try {
    const ControllerSpec candidate = apply_params(base, names, values);
    candidate.validate();
    const Trajectory traj = simulate(scenario, candidate);
    const double cost = ise(traj);
    return std::isfinite(cost) ? cost : kInfiniteFitness;
  } catch (const Error&) {
    return kInfiniteFitness;
  }
}

TuningResult run_tuning(const ExperimentSpec& spec) {
  spec.validate();
  if (!spec.tune) throw ConfigError("experiment has no tune block");
  const TuneSpec& tune = *spec.tune;
  const std::size_t target = spec.tune_target();
  const ControllerSpec base = spec.controllers[target];

  TuningResult result;
  result.spec = spec;
  result.initial = read_params(base, tune.params);
  result.search = optimize(
      [&](std::span<const double> x) {
        return ise_objective(spec.scenario, base, tune.params, x);
      },
      tune.swarm);
  if (!std::isfinite(result.search.best_fitness)) {
    throw TuningFailed("every candidate failed to simulate (" +
                           std::to_string(result.search.failed_evaluations) + " evaluations)",
                       result.search.trace);
  }
  result.tuned = spec;
  result.tuned.controllers[target] = apply_params(base, tune.params, result.search.best_position);
  result.before = run_controller(spec.scenario, base);
  result.after = run_controller(spec.scenario, result.tuned.controllers[target]);
  return result;
}

std::string trace_csv(const ExperimentSpec& spec, const std::vector<TraceRow>& trace) {
  std::string out = with_comments(provenance_lines(spec), "iteration,best_fitness,mean_fitness\n");
  for (const auto& row : trace) {
    out += std::to_string(row.iteration) + "," + format_double(row.best_fitness) + "," +
           format_double(row.mean_fitness) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_tuning(const TuningResult& result,
                                                const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const auto put = [&](const std::string& name, const std::string& text) {
    write_text_file(dir / name, text);
    written.push_back(dir / name);
  };
  const auto lines = provenance_lines(result.spec);
  put("resolved.scn", with_comments({lines[0], lines[1]}, serialize(to_config(result.spec))));
  put("tuned.scn", with_comments({lines[0], lines[1]}, serialize(to_config(result.tuned))));
  put("trace.csv", trace_csv(result.spec, result.search.trace));
  const auto tuned_lines = provenance_lines(result.tuned);
  for (const auto& [stem, run, prov, owner] :
       {std::tuple{"before", &result.before, &lines, &result.spec},
        std::tuple{"after", &result.after, &tuned_lines, &result.tuned}}) {
    if (run->trajectory) put(std::string(stem) + ".csv", trajectory_text(*run->trajectory, *prov));
    put(std::string(stem) + ".json", metrics_json(*owner, *run));
  }

  const auto& params = result.spec.tune->params;
  ordered_json j;
  j["toolkit_version"] = kVersion;
  j["seed"] = result.spec.tune->swarm.seed;
  j["controller"] = result.after.controller.label;
  j["params"] = params;
  j["initial"] = result.initial;
  j["best"] = result.search.best_position;
  j["best_fitness"] = result.search.best_fitness;
  j["evaluations"] = result.search.evaluations;
  j["failed_evaluations"] = result.search.failed_evaluations;
  const auto ise_of = [](const ControllerRun& r) {
    return r.ok() ? ordered_json(r.metrics->ise) : ordered_json(nullptr);
  };
  j["ise_before"] = ise_of(result.before);
  j["ise_after"] = ise_of(result.after);
  j["config"] = serialize(to_config(result.spec));
  put("tuning.json", j.dump(2) + "\n");
  return written;
}

void emit_plot_data(std::ostream& os, const Trajectory& traj,
                    const std::vector<std::string>& channels,
                    const std::vector<std::string>& comments) {
  if (channels.empty()) throw ConfigError("no channels selected");
  std::vector<std::span<const double>> columns;
  columns.reserve(channels.size());
  for (const auto& name : channels) {
    if (name.empty()) throw ConfigError("empty channel name");
    columns.push_back(traj.channel(name));
  }
  write_columns_csv(os, comments, channels, columns);
}

std::vector<std::filesystem::path> emit_standard_figures(
    const Trajectory& traj, const std::filesystem::path& dir, const std::string& stem,
    const std::vector<std::string>& comments) {
  const std::string y = traj.state_names.front();
  const std::vector<std::pair<std::string, std::vector<std::string>>> figures{
      {"output", {"t", y, "ref"}},
      {"error", {"t", "e"}},
      {"control", {"t", "u"}},
      {"surface", {"t", "s"}},
      {"phase", {"e", "edot"}},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [figure, channels] : figures) {
    std::ostringstream os;
    emit_plot_data(os, traj, channels, comments);
    const auto path = dir / (stem + "_" + figure + ".csv");
    write_text_file(path, os.str());
    written.push_back(path);
  }
  return written;
}

}  // namespace smcsim
