#include <doctest.h>

#include <cmath>
#include <numbers>

#include "smcsim/dynamics.hpp"
#include "smcsim/error.hpp"
#include "smcsim/plant.hpp"
#include "smcsim/simulate.hpp"

using namespace smcsim;
using std::numbers::pi;

namespace {

using Scalar = std::array<double, 1>;

Scalar decay(double, const Scalar& x) { return {-x[0]}; }

double rk4_max_error(double dt) {
  Scalar x{1.0};
  double worst = 0.0;
  const int n = static_cast<int>(std::lround(1.0 / dt));
  for (int i = 0; i < n; ++i) {
    x = rk4_step<1>(decay, x, i * dt, dt);
    worst = std::max(worst, std::abs(x[0] - std::exp(-(i + 1) * dt)));
  }
  return worst;
}

ControlPolicy constant_input(double u) {
  return [u](const ControlContext&) { return ControlOutput{u, 0.0}; };
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("pendulum drift and input gain at reference angles") {
    const PendulumParams p;
    const auto up = pendulum_f_g(0.0, 0.0, p);
    CHECK(up.drift == 0.0);

    // D = 0 - (0.006 + 0.009) at theta = pi/2
    const auto side = pendulum_f_g(pi / 2, 0.0, p);
    CHECK(side.drift == doctest::Approx(0.294 / -0.015).epsilon(1e-12));
    CHECK(side.drift == doctest::Approx(-19.6).epsilon(1e-12));
    CHECK(std::abs(side.input_gain) < 1e-12);

    const auto down = pendulum_f_g(pi, 0.0, p);
    CHECK(std::abs(down.drift) < 1e-12);
    CHECK(down.input_gain == doctest::Approx(-0.03 / (0.0009 - 0.015)).epsilon(1e-12));
    CHECK(down.input_gain == doctest::Approx(2.12766).epsilon(1e-5));
  }

  TEST_CASE("pendulum velocity term") {
    const PendulumParams p;
    const double th = 0.4;
    const double w = 2.0;
    const double d = 0.0009 * std::cos(th) * std::cos(th) - 0.015;
    const auto fg = pendulum_f_g(th, w, p);
    CHECK(fg.drift ==
          doctest::Approx((0.294 * std::sin(th) - 0.0009 * std::cos(th) * std::sin(th) * w * w) / d)
              .epsilon(1e-13));
    CHECK(fg.input_gain == doctest::Approx(0.03 * std::cos(th) / d).epsilon(1e-13));
  }

  TEST_CASE("degenerate pendulum parameters are rejected") {
    PendulumParams p;
    CHECK_NOTHROW(p.validate());
    p.inertia = 0.0;
    p.bob_mass = 1.0;
    p.length = 1.0;  // m^2 l^2 == I + m l^2
    CHECK_THROWS_AS(p.validate(), DegenerateParameters);
    CHECK_THROWS_AS(pendulum_f_g(0.0, 0.0, p), DegenerateParameters);

    PendulumParams neg;
    neg.cart_mass = -1.0;
    CHECK_THROWS_AS(neg.validate(), DegenerateParameters);
    CHECK_THROWS_AS(pendulum_f_g(0.0, 0.0, PendulumParams{}, 1.0), DegenerateParameters);
  }

  TEST_CASE("tank rate examples") {
    const TankParams p;
    CHECK(p.max_inflow == doctest::Approx(111.111111111).epsilon(1e-9));
    CHECK(tank_area(40.0, p) == doctest::Approx(pi * 17.5 * 17.5 * 1600.0 / 4900.0));

    const auto balance = tank_rate(70.0, 55.0 * std::sqrt(70.0), p);
    CHECK(std::abs(balance.rate) < 1e-12);
    CHECK_FALSE(balance.floor_active);

    const auto full = tank_rate(40.0, lph_to_cm3_per_s(400.0), p);
    CHECK(full.rate == doctest::Approx((111.11111111111 - 347.850542618) / 314.159265359)
                           .epsilon(1e-9));
    CHECK(full.rate == doctest::Approx(-0.7535).epsilon(1e-4));

    const auto empty_in = tank_rate(40.0, 0.0, p);
    CHECK(empty_in.rate == doctest::Approx(-1.1072).epsilon(1e-4));
    CHECK(empty_in.drift == doctest::Approx(empty_in.rate).epsilon(1e-14));
    CHECK(empty_in.input_gain == doctest::Approx(1.0 / tank_area(40.0, p)));
  }

  TEST_CASE("tank floor and leak") {
    const TankParams p;
    const auto low = tank_rate(0.0, 10.0, p);
    CHECK(low.floor_active);
    CHECK(std::isfinite(low.rate));
    CHECK(low.rate == doctest::Approx(tank_rate(p.level_floor, 10.0, p).rate));

    const auto leaky = tank_rate(40.0, 100.0, p, 5.5);
    CHECK(leaky.rate == doctest::Approx((100.0 - 60.5 * std::sqrt(40.0)) / tank_area(40.0, p)));
    // The controller-facing decomposition ignores the leak.
    CHECK(leaky.drift == doctest::Approx(tank_rate(40.0, 100.0, p).drift));

    TankParams bad;
    bad.top_radius = 0.0;
    CHECK_THROWS_AS(bad.validate(), DegenerateParameters);
  }

  TEST_CASE("van der pol rate examples") {
    CHECK(vdp_rate({0.0, 0.0}, 0.0, 0.0) == StateVector{0.0, 0.0});
    CHECK(vdp_rate({1.0, 1.0}, 0.0, 0.0) == StateVector{1.0, -2.0});
    const auto r = vdp_rate({0.5, 1.0}, 0.0, 0.0);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == doctest::Approx(1.25).epsilon(1e-15));
    const auto driven = vdp_rate({0.5, 1.0}, 2.0, -0.5);
    CHECK(driven[1] == doctest::Approx(2.75));
    const auto fg = vdp_f_g({0.5, 1.0});
    CHECK(fg.drift == doctest::Approx(1.25));
    CHECK(fg.input_gain == 1.0);
  }

  TEST_CASE("disturbance signals") {
    CHECK(eval_disturbance(SinusoidDisturbance{10.0, 1.0}, pi / 2, 0.01) ==
          doctest::Approx(10.0).epsilon(1e-15));
    const ImpulseDisturbance impulse{100.0, 0.0};
    CHECK(eval_disturbance(impulse, 0.0, 0.01) == doctest::Approx(10000.0).epsilon(1e-12));
    CHECK(eval_disturbance(impulse, 0.01, 0.01) == 0.0);
    CHECK(eval_disturbance(NoDisturbance{}, 3.7, 0.01) == 0.0);
    CHECK(eval_disturbance(LeakDisturbance{5.5, 200.0}, 300.0, 0.01) == 0.0);
    CHECK(leak_coefficient_at(LeakDisturbance{5.5, 200.0}, 199.99) == 0.0);
    CHECK(leak_coefficient_at(LeakDisturbance{5.5, 200.0}, 200.0) == 5.5);

    CHECK_THROWS_AS(validate(SinusoidDisturbance{-1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate(ImpulseDisturbance{std::nan(""), 0.0}), ConfigError);
    CHECK_THROWS_AS(validate(LeakDisturbance{-0.1, 0.0}), ConfigError);
  }

  TEST_CASE("impulse discretisation preserves area") {
    for (const double onset : {0.0, 0.37, 1.0, 2.5}) {
      for (const double dt : {0.01, 0.005, 0.02}) {
        const ImpulseDisturbance impulse{100.0, onset};
        double area = 0.0;
        int hits = 0;
        const int n = static_cast<int>(std::lround(5.0 / dt));
        for (int i = 0; i <= n; ++i) {
          const double v = eval_disturbance(impulse, i * dt, dt);
          area += v * dt;
          hits += v != 0.0;
        }
        CHECK(hits == 1);
        CHECK(area == doctest::Approx(100.0).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("rk4 step examples") {
    const auto one = rk4_step<1>(decay, Scalar{1.0}, 0.0, 0.01);
    CHECK(std::abs(one[0] - std::exp(-0.01)) <= 1e-10);
    CHECK(one[0] == doctest::Approx(0.99004983).epsilon(1e-8));

    const auto still = rk4_step<2>([](double, const StateVector&) { return StateVector{}; },
                                   StateVector{0.3, -0.2}, 0.0, 0.01);
    CHECK(still == StateVector{0.3, -0.2});

    const auto ramp = rk4_step<1>([](double, const Scalar&) { return Scalar{1.0}; }, Scalar{0.0},
                                  0.0, 0.01);
    CHECK(ramp[0] == 0.01);
  }

  TEST_CASE("rk4 is fourth order") {
    const double coarse = rk4_max_error(0.01);
    const double fine = rk4_max_error(0.005);
    CHECK(coarse <= 1e-9);
    const double ratio = coarse / fine;
    CHECK(ratio >= 14.0);
    CHECK(ratio <= 18.0);
  }

  TEST_CASE("rk4 reports non-finite derivatives with the step time") {
    const auto blow = [](double, const Scalar&) { return Scalar{std::nan("")}; };
    try {
      rk4_step<1>(blow, Scalar{0.0}, 1.25, 0.01);
      FAIL("expected SimulationDiverged");
    } catch (const SimulationDiverged& err) {
      REQUIRE(err.time());
      CHECK(*err.time() == 1.25);
    }
  }

  TEST_CASE("frozen-cart pendulum conserves energy") {
    const PendulumParams p;
    StateVector x{pi / 6, 0.0};
    const double e0 = pendulum_rotational_energy(x[0], x[1], p);
    const auto rhs = [&p](double, const StateVector& s) {
      return StateVector{s[1], pendulum_rotational_accel(s[0], p)};
    };
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      x = rk4_step<2>(rhs, x, i * 0.01, 0.01);
      const double e = pendulum_rotational_energy(x[0], x[1], p);
      worst = std::max(worst, std::abs((e - e0) / e0));
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("tank level does not increase without inflow") {
    Scenario sc;
    sc.plant = TankParams{};
    sc.initial_state = {60.0, 0.0};
    sc.horizon = 300.0;
    const Trajectory traj = simulate(Plant(sc.plant), constant_input(0.0), sc);
    for (std::size_t i = 1; i < traj.size(); ++i) {
      REQUIRE(traj.state[0][i] <= traj.state[0][i - 1]);
      REQUIRE(traj.state[0][i] >= 0.0);
    }
    CHECK(traj.state[0].back() < 60.0);
  }

  TEST_CASE("tank at balance stays put") {
    Scenario sc;
    TankParams tank;
    tank.max_inflow = 500.0;
    sc.plant = tank;
    sc.initial_state = {70.0, 0.0};
    sc.horizon = 100.0;
    const Trajectory traj = simulate(Plant(sc.plant), constant_input(55.0 * std::sqrt(70.0)), sc);
    for (double h : traj.state[0]) REQUIRE(std::abs(h - 70.0) <= 1e-6);
  }

  TEST_CASE("tank inflow is clamped into the actuator range") {
    Scenario sc;
    sc.plant = TankParams{};
    sc.initial_state = {30.0, 0.0};
    sc.horizon = 1.0;
    const Trajectory high = simulate(Plant(sc.plant), constant_input(1e6), sc);
    const Trajectory low = simulate(Plant(sc.plant), constant_input(-50.0), sc);
    for (double u : high.u) CHECK(u == doctest::Approx(TankParams{}.max_inflow));
    for (double u : low.u) CHECK(u == 0.0);
  }

  TEST_CASE("optional pendulum force clamp") {
    Scenario sc;
    sc.force_limit = 5.0;
    sc.initial_state = {0.2, 0.0};
    sc.horizon = 0.5;
    const Trajectory traj = simulate(Plant(sc.plant, sc.force_limit), constant_input(-40.0), sc);
    for (double u : traj.u) CHECK(u == -5.0);
  }
}

TEST_SUITE("dynamics") {
  TEST_CASE("pendulum at the upright target has zero error") {
    Scenario sc;
    sc.initial_state = {0.0, 0.0};
    ControllerSpec c;
    c.gains = {105.0, 4.0, 0.8};
    for (const auto kind : {ControllerKind::pid, ControllerKind::smc1, ControllerKind::pid_smc_eq,
                            ControllerKind::pid_smc_proposed}) {
      c.kind = kind;
      const Trajectory traj = simulate(sc, c);
      for (double e : traj.e) REQUIRE(e == 0.0);
    }
  }

  TEST_CASE("trajectory channels are consistent") {
    Scenario sc;
    sc.initial_state = {pi / 6, 0.0};
    sc.disturbance = SinusoidDisturbance{10.0, 1.0};
    ControllerSpec c;
    c.gains = {105.0, 4.0, 0.8};
    c.reaching.layer_width = 0.3;
    const Trajectory traj = simulate(sc, c);

    REQUIRE(traj.size() == sc.steps() + 1);
    for (const auto* ch : {&traj.ref, &traj.e, &traj.e_dot, &traj.e_int, &traj.s, &traj.u,
                           &traj.d, &traj.state[0], &traj.state[1]}) {
      CHECK(ch->size() == traj.size());
    }
    double running = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (i > 0) {
        REQUIRE(traj.t[i] > traj.t[i - 1]);
        REQUIRE(traj.t[i] == doctest::Approx(i * sc.dt).epsilon(1e-12));
        running += 0.5 * (traj.e[i - 1] + traj.e[i]) * (traj.t[i] - traj.t[i - 1]);
      }
      REQUIRE(traj.e_int[i] == doctest::Approx(running).epsilon(1e-12));
      const double s = c.gains.kp * traj.e[i] + c.gains.kd * traj.e_dot[i] +
                       c.gains.ki * traj.e_int[i];
      REQUIRE(traj.s[i] == s);
      REQUIRE(traj.e[i] == traj.ref[i] - traj.state[0][i]);
      REQUIRE(traj.d[i] == 10.0 * std::sin(traj.t[i]));
    }
  }

  TEST_CASE("van der pol tracks the sinusoidal reference") {
    Scenario sc;
    sc.plant = VanDerPolParams{};
    sc.initial_state = {pi / 60, 0.0};
    sc.reference = SinusoidReference{0.1, 1.0, 0.0};
    sc.disturbance = SinusoidDisturbance{10.0, 1.0};
    sc.horizon = 20.0;
    ControllerSpec c;
    c.gains = {105.0, 8.0, 0.8};
    c.reaching.layer_width = 0.3;
    const Trajectory traj = simulate(sc, c);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj.t[i] > 5.0) REQUIRE(std::abs(traj.e[i]) < 0.01);
    }
  }

  TEST_CASE("simulation rejects incompatible setups") {
    Scenario tank;
    tank.plant = TankParams{};
    tank.initial_state = {20.0, 0.0};
    ControllerSpec smc1;
    smc1.kind = ControllerKind::smc1;
    CHECK_THROWS_AS(simulate(tank, smc1), ConfigError);
    ControllerSpec pid_d;
    pid_d.gains = {1.0, 1.0, 0.5};
    CHECK_THROWS_AS(simulate(tank, pid_d), ConfigError);

    Scenario leak_on_pendulum;
    leak_on_pendulum.disturbance = LeakDisturbance{1.0, 0.0};
    CHECK_THROWS_AS(leak_on_pendulum.validate(), ConfigError);

    Scenario bad_grid;
    bad_grid.dt = 0.0;
    CHECK_THROWS_AS(bad_grid.validate(), ConfigError);
  }

  TEST_CASE("failures carry the sample time") {
    Scenario sc;
    sc.plant = VanDerPolParams{};
    sc.initial_state = {0.1, 0.0};
    const ControlPolicy late_nan = [](const ControlContext& ctx) {
      return ControlOutput{ctx.t >= 0.5 ? std::nan("") : 0.0, 0.0};
    };
    try {
      simulate(Plant(sc.plant), late_nan, sc);
      FAIL("expected SimulationDiverged");
    } catch (const SimulationDiverged& err) {
      REQUIRE(err.time());
      CHECK(*err.time() == doctest::Approx(0.5));
    }

    Scenario side;
    side.initial_state = {pi / 2, 0.0};
    ControllerSpec c;
    c.gains = {105.0, 4.0, 0.8};
    try {
      simulate(side, c);
      FAIL("expected ControlSingularity");
    } catch (const ControlSingularity& err) {
      REQUIRE(err.time());
      CHECK(*err.time() == 0.0);
    }
  }
}
