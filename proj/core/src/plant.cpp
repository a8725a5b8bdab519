#include "smcsim/plant.hpp"

#include <algorithm>
#include <type_traits>

namespace smcsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double ActuatorRange::clamp(double u) const { return std::clamp(u, lo, hi); }

Plant::Plant(PlantParams params, std::optional<double> force_limit)
    : params_(std::move(params)), force_limit_(force_limit) {
  std::visit(overloaded{
                 [](const PendulumParams& p) { p.validate(); },
                 [](const TankParams& p) { p.validate(); },
                 [](const VanDerPolParams&) {},
             },
             params_);
  if (force_limit_ && !(*force_limit_ > 0.0)) {
    throw ConfigError("force limit must be positive");
  }
  if (force_limit_ && !std::holds_alternative<PendulumParams>(params_)) {
    throw ConfigError("force limit only applies to the pendulum");
  }
}

std::string_view Plant::name() const noexcept {
  return std::visit(overloaded{
                        [](const PendulumParams&) { return std::string_view{"pendulum"}; },
                        [](const TankParams&) { return std::string_view{"tank"}; },
                        [](const VanDerPolParams&) { return std::string_view{"vanderpol"}; },
                    },
                    params_);
}

std::size_t Plant::order() const noexcept {
  return std::holds_alternative<TankParams>(params_) ? 1 : 2;
}

std::vector<std::string> Plant::state_names() const {
  return std::visit(overloaded{
                        [](const PendulumParams&) {
                          return std::vector<std::string>{"theta", "theta_dot"};
                        },
                        [](const TankParams&) { return std::vector<std::string>{"h"}; },
                        [](const VanDerPolParams&) {
                          return std::vector<std::string>{"x1", "x2"};
                        },
                    },
                    params_);
}

AffineTerms Plant::affine(const StateVector& x) const {
  return std::visit(overloaded{
                        [&](const PendulumParams& p) { return pendulum_f_g(x[0], x[1], p); },
                        [&](const TankParams& p) {
                          const TankRate r = tank_rate(x[0], 0.0, p);
                          return AffineTerms{r.drift, r.input_gain};
                        },
                        [&](const VanDerPolParams&) { return vdp_f_g(x); },
                    },
                    params_);
}

StateVector Plant::derivative(const StateVector& x, const PlantInputs& in) const {
  return std::visit(overloaded{
                        [&](const PendulumParams& p) {
                          const AffineTerms a = pendulum_f_g(x[0], x[1], p);
                          return StateVector{x[1], a.drift + a.input_gain * in.u + in.d};
                        },
                        [&](const TankParams& p) {
                          const TankRate r = tank_rate(x[0], in.u, p, in.leak);
                          return StateVector{r.rate + in.d, 0.0};
                        },
                        [&](const VanDerPolParams&) { return vdp_rate(x, in.u, in.d); },
                    },
                    params_);
}

void Plant::project(StateVector& x) const {
  if (const auto* tank = std::get_if<TankParams>(&params_)) {
    x[0] = std::clamp(x[0], 0.0, tank->max_height);
  }
}

ActuatorRange Plant::actuator_range() const noexcept {
  if (const auto* tank = std::get_if<TankParams>(&params_)) {
    return {0.0, tank->max_inflow};
  }
  if (force_limit_) return {-*force_limit_, *force_limit_};
  return {};
}

bool Plant::floor_active(const StateVector& x) const {
  if (const auto* tank = std::get_if<TankParams>(&params_)) {
    return x[0] <= tank->level_floor;
  }
  return false;
}

}  // namespace smcsim
