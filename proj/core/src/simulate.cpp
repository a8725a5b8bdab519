#include "smcsim/simulate.hpp"

#include <cmath>

namespace smcsim {

namespace {

[[noreturn]] void rethrow_at(const Error& err, double t) {
  const double when = err.time().value_or(t);
  switch (err.kind()) {
    case ErrorKind::control_singularity:
      throw ControlSingularity(err.what(), when);
    case ErrorKind::simulation_diverged:
      throw SimulationDiverged(err.what(), when);
    default:
      throw Error(err.kind(), err.what(), when);
  }
}

}  // namespace

void Scenario::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (dt > horizon) throw ConfigError("dt must not exceed the horizon");
  smcsim::validate(disturbance);
  if (std::holds_alternative<LeakDisturbance>(disturbance) &&
      !std::holds_alternative<TankParams>(plant)) {
    throw ConfigError("leak disturbance only applies to the tank");
  }
  for (double v : initial_state) {
    if (!std::isfinite(v)) throw ConfigError("initial state must be finite");
  }
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

Trajectory simulate(const Plant& plant, const ControlPolicy& policy, const Scenario& scenario) {
  scenario.validate();
  const std::size_t order = plant.order();
  const std::size_t steps = scenario.steps();
  const double dt = scenario.dt;
  const ActuatorRange range = plant.actuator_range();

  Trajectory traj;
  traj.state_names = plant.state_names();
  traj.state.resize(order);
  traj.reserve(steps + 1);

  StateVector x = scenario.initial_state;
  if (order == 1) x[1] = 0.0;
  plant.project(x);

  double e_int = 0.0;
  double e_prev = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double t = static_cast<double>(n) * dt;
    try {
      const ReferenceSample ref = eval_reference(scenario.reference, t);
      ErrorFrame frame;
      frame.e = ref.value - plant.output(x);
      frame.ref_d1 = ref.d1;
      frame.ref_d2 = ref.d2;
      if (order == 2) frame.e_dot = ref.d1 - x[1];
      if (n > 0) e_int += 0.5 * (e_prev + frame.e) * dt;
      frame.e_int = e_int;
      e_prev = frame.e;

      const AffineTerms affine = plant.affine(x);
      const ControlOutput out = policy(ControlContext{t, x, frame, affine, order});
      const double u = range.clamp(out.u);
      if (!std::isfinite(u) || !std::isfinite(out.s)) {
        throw SimulationDiverged("non-finite control", t);
      }

      PlantInputs in{u, eval_disturbance(scenario.disturbance, t, dt),
                     leak_coefficient_at(scenario.disturbance, t)};
      double d_logged = in.d;
      if (order == 1) {
        const StateVector rate = plant.derivative(x, in);
        frame.e_dot = ref.d1 - rate[0];
        if (in.leak != 0.0) {
          d_logged += rate[0] - plant.derivative(x, {u, in.d, 0.0})[0];
        }
      }

      traj.t.push_back(t);
      for (std::size_t i = 0; i < order; ++i) traj.state[i].push_back(x[i]);
      traj.ref.push_back(ref.value);
      traj.e.push_back(frame.e);
      traj.e_dot.push_back(frame.e_dot);
      traj.e_int.push_back(frame.e_int);
      traj.s.push_back(out.s);
      traj.u.push_back(u);
      traj.d.push_back(d_logged);

      if (n == steps) break;

      x = rk4_step(
          [&plant, &in](double, const StateVector& xs) { return plant.derivative(xs, in); }, x,
          t, dt);
      plant.project(x);
    } catch (const Error& err) {
      rethrow_at(err, t);
    }
  }
  return traj;
}

Trajectory simulate(const Plant& plant, const ControllerSpec& controller,
                    const Scenario& scenario) {
  controller.validate();
  if (plant.order() < 2 && controller.needs_output_rate()) {
    throw ConfigError("controller '" + std::string(to_string(controller.kind)) +
                      "' needs the output rate, which the " + std::string(plant.name()) +
                      " plant does not expose (use kd = 0)");
  }
  const ControlPolicy policy = [&controller](const ControlContext& ctx) {
    return compute_control(controller, ctx.frame, ctx.plant, ctx.order);
  };
  return simulate(plant, policy, scenario);
}

Trajectory simulate(const Scenario& scenario, const ControllerSpec& controller) {
  const Plant plant(scenario.plant, scenario.force_limit);
  return simulate(plant, controller, scenario);
}

}  // namespace smcsim
