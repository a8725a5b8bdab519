#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smcsim/config.hpp"
#include "smcsim/mpso.hpp"
#include "smcsim/simulate.hpp"
#include "smcsim/smc.hpp"

namespace smcsim {

/// `tune { ... }` block: which controller fields to search and how.
struct TuneSpec {
  std::string controller;           // label; empty picks the first PID-SMC block
  std::vector<std::string> params;  // kp ki kd k k_sc alpha delta lambda
  SwarmConfig swarm;                // swarm.bounds parallels params
};

/// A scenario plus the controllers to compare on it.
struct ExperimentSpec {
  Scenario scenario;
  std::vector<ControllerSpec> controllers;
  std::optional<TuneSpec> tune;

  /// At least one controller, unique labels, resolvable tune target.
  void validate() const;
  const ControllerSpec& controller(std::string_view label) const;
  /// Index of the controller the tune block refers to.
  std::size_t tune_target() const;
};

/// Names accepted in `tune.params`.
inline constexpr std::string_view kTunableParams[] = {"kp", "ki",    "kd",    "k",
                                                       "k_sc", "alpha", "delta", "lambda"};

/// Copy of `base` with the named fields replaced. Throws ConfigError on
/// unknown names or a size mismatch.
ControllerSpec apply_params(const ControllerSpec& base, const std::vector<std::string>& names,
                            std::span<const double> values);
std::vector<double> read_params(const ControllerSpec& spec, const std::vector<std::string>& names);

/// Throws ConfigError on unknown keys, bad types or invalid values.
ExperimentSpec experiment_from_config(const ConfigTable& table);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Fully resolved form, every default written out. Round-trips through
/// experiment_from_config.
ConfigTable to_config(const ExperimentSpec& spec);

// Bundled presets ------------------------------------------------------------

/// Pendulum from theta0 = pi/6 to upright, d = 10 sin t, comparing smc1,
/// pid_smc_eq and pid_smc_proposed; carries a tune block for the proposed gains.
ExperimentSpec pendulum_preset();
/// Same plant with the area-100 impulse (1000 delta(10 t)) and a PID baseline.
ExperimentSpec pendulum_impulse_preset();
/// Start at the downward equilibrium theta0 = pi.
ExperimentSpec pendulum_swingup_preset();
/// Conical tank to h_d = 40 cm with a leak of 0.1 k from t = 200 s.
ExperimentSpec tank_preset();
/// Van der Pol tracking y_d = 0.1 sin t with d = 10 sin t.
ExperimentSpec vanderpol_preset();

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ExperimentSpec preset(std::string_view name);

}  // namespace smcsim
