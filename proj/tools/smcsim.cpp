// smcsim: run, compare and tune sliding-mode controllers from scenario files.
//
// Failures exit nonzero with one JSON object on stderr:
//   {"error": "<kind>", "message": "...", "time": <seconds or null>}

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smcsim/experiment.hpp"
#include "smcsim/scenario.hpp"
#include "smcsim/version.hpp"

namespace fs = std::filesystem;
using namespace smcsim;

namespace {

enum ExitCode { kOk = 0, kConfigFailure = 1, kRunFailure = 2, kTuningFailure = 3, kUsage = 64 };

int report(std::string_view kind, std::string_view message, std::optional<double> time) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  j["time"] = time ? nlohmann::ordered_json(*time) : nlohmann::ordered_json(nullptr);
  std::cerr << j.dump() << "\n";
  if (kind == "config" || kind == "io" || kind == "degenerate_parameters") return kConfigFailure;
  if (kind == "tuning_failed") return kTuningFailure;
  if (kind == "usage") return kUsage;
  return kRunFailure;
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::string out;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--seed", seed, "Override the scenario (and tuning) seed");
    cmd.add_option("--dt", dt, "Override the sampling period [s]");
    cmd.add_option("--horizon", horizon, "Override the horizon [s]");
    cmd.add_option("--out", out, "Output directory (default out/<scenario name>)");
  }

  void apply(ExperimentSpec& spec) const {
    if (seed) {
      spec.scenario.seed = *seed;
      if (spec.tune) spec.tune->swarm.seed = *seed;
    }
    if (dt) spec.scenario.dt = *dt;
    if (horizon) spec.scenario.horizon = *horizon;
    spec.validate();
  }

  fs::path dir(const ExperimentSpec& spec) const {
    return out.empty() ? fs::path("out") / spec.scenario.name : fs::path(out);
  }
};

/// A scenario file, or the name of a bundled preset when no such file exists.
ExperimentSpec load(const std::string& source) {
  if (!fs::is_regular_file(source)) {
    for (const auto& name : preset_names()) {
      if (name == source) return preset(name);
    }
  }
  return load_experiment(source);
}

void list_written(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << "\n";
}

int run_simulate(const std::string& source, const std::string& label, bool figures,
                 const Overrides& ov) {
  ExperimentSpec spec = load(source);
  ov.apply(spec);
  const ControllerSpec& chosen = label.empty() ? spec.controllers.front() : spec.controller(label);
  ExperimentSpec single = spec;
  single.controllers = {chosen};
  single.tune.reset();
  const ExperimentResult result = run_experiment(single);
  const fs::path dir = ov.dir(spec);
  list_written(write_experiment(result, dir));
  const ControllerRun& run = result.runs.front();
  if (figures && run.trajectory) {
    list_written(emit_standard_figures(*run.trajectory, dir / "figures", chosen.label,
                                       provenance_lines(single)));
  }
  if (!run.ok()) return report(to_string(*run.failure), run.failure_message, run.failure_time);
  return kOk;
}

int run_compare(const std::string& source, bool figures, const Overrides& ov) {
  ExperimentSpec spec = load(source);
  ov.apply(spec);
  const ExperimentResult result = run_experiment(spec);
  const fs::path dir = ov.dir(spec);
  list_written(write_experiment(result, dir));
  if (figures) {
    const auto lines = provenance_lines(spec);
    for (const auto& run : result.runs) {
      if (run.trajectory) {
        list_written(emit_standard_figures(*run.trajectory, dir / "figures",
                                           run.controller.label, lines));
      }
    }
  }
  return kOk;
}

int run_tune(const std::string& source, std::optional<std::size_t> threads, const Overrides& ov) {
  ExperimentSpec spec = load(source);
  if (threads && spec.tune) spec.tune->swarm.threads = *threads;
  ov.apply(spec);
  try {
    const TuningResult result = run_tuning(spec);
    list_written(write_tuning(result, ov.dir(spec)));
  } catch (const TuningFailed& err) {
    write_text_file(ov.dir(spec) / "trace.csv", trace_csv(spec, err.trace()));
    throw;
  }
  return kOk;
}

int run_plotdata(const std::string& path, const std::vector<std::string>& channels,
                 const std::string& out, const std::string& figures_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const Trajectory traj = read_trajectory_csv(in);
  if (!figures_dir.empty()) {
    list_written(emit_standard_figures(traj, figures_dir, fs::path(path).stem().string()));
    return kOk;
  }
  if (out.empty()) {
    emit_plot_data(std::cout, traj, channels);
  } else {
    std::ostringstream os;
    emit_plot_data(os, traj, channels);
    write_text_file(out, os.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-mode control simulation and tuning toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Overrides ov;
  std::string source;
  std::string label;
  bool figures = false;
  std::optional<std::size_t> threads;

  auto* sim = app.add_subcommand("simulate", "Run one controller of a scenario");
  sim->add_option("scenario", source, "Scenario file or preset name")->required();
  sim->add_option("--controller", label, "Controller label (default: the first block)");
  sim->add_flag("--figures", figures, "Also write the standard figure data");
  ov.add_to(*sim);

  auto* cmp = app.add_subcommand("compare", "Run every controller and tabulate metrics");
  cmp->add_option("scenario", source, "Scenario file or preset name")->required();
  cmp->add_flag("--figures", figures, "Also write the standard figure data");
  ov.add_to(*cmp);

  auto* tune = app.add_subcommand("tune", "Tune controller gains with the swarm");
  tune->add_option("scenario", source, "Scenario file or preset name")->required();
  tune->add_option("--threads", threads, "Fitness evaluation threads");
  ov.add_to(*tune);

  std::string traj_path;
  std::vector<std::string> channels;
  std::string plot_out;
  std::string figures_dir;
  auto* plot = app.add_subcommand("plotdata", "Extract channels from a trajectory CSV");
  plot->add_option("trajectory", traj_path, "Trajectory CSV")->required();
  auto* chan = plot->add_option("--channels", channels, "Comma-separated channel names")
                   ->delimiter(',');
  auto* figs = plot->add_option("--figures", figures_dir, "Write the standard figure set here");
  chan->excludes(figs);
  plot->add_option("--out", plot_out, "Output file (default stdout)");

  std::string preset_name;
  bool list = false;
  auto* pre = app.add_subcommand("preset", "Print a bundled scenario in canonical form");
  pre->add_option("name", preset_name, "Preset name");
  pre->add_flag("--list", list, "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), std::nullopt);
  }

  try {
    if (*sim) return run_simulate(source, label, figures, ov);
    if (*cmp) return run_compare(source, figures, ov);
    if (*tune) return run_tune(source, threads, ov);
    if (*plot) return run_plotdata(traj_path, channels, plot_out, figures_dir);
    if (*pre) {
      if (list || preset_name.empty()) {
        for (const auto& name : preset_names()) std::cout << name << "\n";
        return kOk;
      }
      std::cout << serialize(to_config(preset(preset_name)));
      return kOk;
    }
  } catch (const Error& err) {
    return report(to_string(err.kind()), err.what(), err.time());
  } catch (const std::exception& err) {
    return report("internal", err.what(), std::nullopt);
  }
  return kOk;
}
