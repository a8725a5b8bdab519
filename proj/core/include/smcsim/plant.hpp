#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smcsim/dynamics.hpp"

namespace smcsim {

struct VanDerPolParams {};

using PlantParams = std::variant<PendulumParams, TankParams, VanDerPolParams>;

struct ActuatorRange {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double clamp(double u) const;
};

/// Exogenous inputs held over one integration step.
struct PlantInputs {
  double u = 0.0;
  double d = 0.0;
  double leak = 0.0;
};

/// A plant in control-affine form, y^(n) = f(x) + g(x) u + d, with y = x[0].
class Plant {
 public:
  explicit Plant(PlantParams params, std::optional<double> force_limit = std::nullopt);

  const PlantParams& params() const noexcept { return params_; }
  std::string_view name() const noexcept;

  /// 2 for the pendulum and Van der Pol, 1 for the tank.
  std::size_t order() const noexcept;
  std::vector<std::string> state_names() const;

  double output(const StateVector& x) const noexcept { return x[0]; }
  /// Nominal f and g of the highest output derivative at state x.
  AffineTerms affine(const StateVector& x) const;
  StateVector derivative(const StateVector& x, const PlantInputs& in) const;

  /// Clamps states onto their physical range (tank level into [0, H]).
  void project(StateVector& x) const;
  ActuatorRange actuator_range() const noexcept;

  /// True when the level floor was hit evaluating x.
  bool floor_active(const StateVector& x) const;

 private:
  PlantParams params_;
  std::optional<double> force_limit_;
};

}  // namespace smcsim
