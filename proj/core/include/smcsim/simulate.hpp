#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "smcsim/dynamics.hpp"
#include "smcsim/plant.hpp"
#include "smcsim/smc.hpp"
#include "smcsim/trajectory.hpp"

namespace smcsim {

/// Plant, signals, initial state and time grid shared by every controller of
/// an experiment.
struct Scenario {
  std::string name = "scenario";
  PlantParams plant = PendulumParams{};
  std::optional<double> force_limit;  // symmetric pendulum force clamp
  StateVector initial_state{};
  ReferenceSpec reference = ConstantReference{};
  DisturbanceSpec disturbance = NoDisturbance{};
  double horizon = 5.0;  // s
  double dt = 0.01;      // s, controller sampling period
  std::uint64_t seed = 0;

  void validate() const;
  /// Number of integration steps; the trajectory has steps() + 1 samples.
  std::size_t steps() const;
};

/// Everything a control law may read at one sample.
struct ControlContext {
  double t = 0.0;
  const StateVector& x;
  const ErrorFrame& frame;
  const AffineTerms& plant;
  std::size_t order = 2;
};

using ControlPolicy = std::function<ControlOutput(const ControlContext&)>;

/// Closed-loop rollout on the sampling grid t_n = n dt. Per sample: build the
/// error frame (e_int by the trapezoidal rule), evaluate the policy, clamp to
/// the actuator range, hold u and d over the step, and advance with rk4_step.
/// Throws SimulationDiverged or ControlSingularity carrying the sample time.
Trajectory simulate(const Plant& plant, const ControlPolicy& policy, const Scenario& scenario);

/// Same, for a named controller block. Throws ConfigError if the controller
/// needs e_dot and the plant is first order.
Trajectory simulate(const Plant& plant, const ControllerSpec& controller,
                    const Scenario& scenario);

Trajectory simulate(const Scenario& scenario, const ControllerSpec& controller);

}  // namespace smcsim
