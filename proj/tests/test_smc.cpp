#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "smcsim/dynamics.hpp"
#include "smcsim/error.hpp"
#include "smcsim/smc.hpp"

using namespace smcsim;

namespace {

/// s_dot for a second-order plant written out from the surface definition:
/// e_ddot = r'' - (f + g u + d).
double surface_rate_2nd(const SurfaceGains& k, const ErrorFrame& fr, const AffineTerms& p,
                        double u) {
  const double e_ddot = fr.ref_d2 - (p.drift + p.input_gain * u);
  return k.kp * fr.e_dot + k.kd * e_ddot + k.ki * fr.e;
}

/// First order, s = kp e + ki int(e): s_dot = kp (r' - (f + g u)) + ki e.
double surface_rate_1st(const SurfaceGains& k, const ErrorFrame& fr, const AffineTerms& p,
                        double u) {
  return k.kp * (fr.ref_d1 - (p.drift + p.input_gain * u)) + k.ki * fr.e;
}

struct Sample {
  SurfaceGains gains;
  ReachingParams reaching;
  ErrorFrame frame;
  AffineTerms plant;
};

Sample random_sample(std::mt19937_64& rng, bool first_order) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 200.0);
  Sample s;
  s.gains = {pos(rng), pos(rng), first_order ? 0.0 : std::uniform_real_distribution(0.1, 5.0)(rng)};
  s.reaching.k = pos(rng);
  s.reaching.switching_gain = pos(rng);
  s.reaching.power = std::uniform_real_distribution(0.0, 2.0)(rng);
  s.reaching.layer_width = std::uniform_real_distribution(0.01, 1.0)(rng);
  s.frame = {unit(rng), 3.0 * unit(rng), 0.5 * unit(rng), unit(rng), unit(rng)};
  if (first_order) s.frame.e_dot = 0.0;
  double g = 0.0;
  while (std::abs(g) < 0.05) g = 3.0 * unit(rng);
  s.plant = {20.0 * unit(rng), g};
  return s;
}

}  // namespace

TEST_SUITE("smc") {
  TEST_CASE("surface examples and linearity") {
    CHECK(surface({1, 0, 0}, {0.3, 0, 0}) == doctest::Approx(0.3));
    CHECK(surface({2, 3, 1}, {1.0, 0.5, 0.2}) == doctest::Approx(3.1).epsilon(1e-15));
    CHECK(surface({2, 3, 1}, {}) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
      const SurfaceGains g{u(rng) + 3, u(rng) + 3, u(rng) + 3};
      const ErrorFrame a{u(rng), u(rng), u(rng)};
      const ErrorFrame b{u(rng), u(rng), u(rng)};
      const double c = u(rng);
      const ErrorFrame mix{a.e + c * b.e, a.e_dot + c * b.e_dot, a.e_int + c * b.e_int};
      CHECK(surface(g, mix) ==
            doctest::Approx(surface(g, a) + c * surface(g, b)).epsilon(1e-12));
    }
  }

  TEST_CASE("sign and saturation") {
    CHECK(sign_fn(2.0) == 1.0);
    CHECK(sign_fn(0.0) == 0.0);
    CHECK(sign_fn(-3.0) == -1.0);
    CHECK(sat_fn(1.0, 0.5) == 1.0);
    CHECK(sat_fn(0.25, 0.5) == 0.5);
    CHECK(sat_fn(-1.0, 0.5) == -1.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
      const double s = u(rng);
      const double w = std::abs(u(rng)) + 1e-3;
      CHECK(std::abs(sat_fn(s, w)) <= 1.0);
      CHECK(sat_fn(-s, w) == -sat_fn(s, w));
      if (std::abs(s) > w) CHECK(sat_fn(s, w) == sign_fn(s));
      // continuity at the layer edge
      CHECK(std::abs(sat_fn(w * (1 - 1e-12), w) - 1.0) < 1e-11);
    }
  }

  TEST_CASE("reaching rate examples") {
    const ReachingParams proposed{ReachingLaw::proposed, 35.0, 1.5, 0.5, 0.05};
    CHECK(reaching_rate(proposed, 1.0) == doctest::Approx(-36.5).epsilon(1e-15));
    CHECK(reaching_rate(proposed, 0.0) == 0.0);
    const ReachingParams ce{ReachingLaw::constant_exponential, 35.0, 1.5, 0.5, 0.05};
    CHECK(reaching_rate(ce, -0.5) == doctest::Approx(19.0).epsilon(1e-15));
    CHECK(reaching_rate(ce, 0.0) == 0.0);
  }

  TEST_CASE("reaching condition s * rate < 0") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
      ReachingParams p;
      p.law = i % 2 ? ReachingLaw::proposed : ReachingLaw::constant_exponential;
      p.k = std::abs(u(rng)) + 1e-3;
      p.switching_gain = std::abs(u(rng)) + 1e-3;
      p.power = std::abs(u(rng)) / 5.0;
      p.layer_width = std::abs(u(rng)) / 10.0 + 1e-3;
      double s = u(rng);
      if (i % 7 == 0) s *= 1e-4;  // inside the layer
      if (s == 0.0) continue;
      CHECK(s * reaching_rate(p, s) < 0.0);
    }
  }

  TEST_CASE("reaching law drives s into the layer, faster for larger k_sc") {
    const auto entry_time = [](double k_sc, double s0) {
      ReachingParams p{ReachingLaw::proposed, 5.0, k_sc, 0.5, 0.05};
      std::array<double, 1> s{s0};
      const double dt = 1e-3;
      double t = 0.0;
      while (std::abs(s[0]) > p.layer_width) {
        const auto next = rk4_step<1>(
            [&p](double, const std::array<double, 1>& x) {
              return std::array<double, 1>{reaching_rate(p, x[0])};
            },
            s, t, dt);
        REQUIRE(std::abs(next[0]) < std::abs(s[0]));
        s = next;
        t += dt;
        REQUIRE(t < 100.0);
      }
      return t;
    };
    for (const double s0 : {3.0, -2.0, 0.4}) {
      const double slow = entry_time(0.5, s0);
      const double mid = entry_time(2.0, s0);
      const double fast = entry_time(8.0, s0);
      CHECK(slow > mid);
      CHECK(mid > fast);
    }
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((SurfaceGains{0.0, 1.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((SurfaceGains{1.0, 0.0, 1.0}.validate()), ConfigError);
    CHECK_THROWS_AS((SurfaceGains{1.0, 1.0, -1.0}.validate()), ConfigError);
    CHECK_NOTHROW((SurfaceGains{1.0, 1.0, 0.0}.validate()));

    ReachingParams p;
    CHECK_NOTHROW(p.validate());
    p.power = 2.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.layer_width = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.k = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);

    p = {};
    CHECK(p.switching_dominates(1.0));
    CHECK_FALSE(p.switching_dominates(10.0));

    CHECK(parse_controller_kind("smc1") == ControllerKind::smc1);
    CHECK(parse_controller_kind("pid_smc_proposed") == ControllerKind::pid_smc_proposed);
    CHECK_THROWS_AS(parse_controller_kind("fuzzy"), ConfigError);
  }

  TEST_CASE("equivalent control examples") {
    const SurfaceGains g{105.0, 4.0, 0.8};
    CHECK(equivalent_control(g, {}, {0.0, 1.0}) == 0.0);
    ErrorFrame fr;
    fr.e = 0.1;
    CHECK(equivalent_control(g, fr, {-19.6, 2.0}) == doctest::Approx(10.05).epsilon(1e-13));
    CHECK_THROWS_AS(equivalent_control(g, fr, {-19.6, 1e-12}), ControlSingularity);
  }

  TEST_CASE("proposed control examples") {
    const SurfaceGains g{105.0, 4.0, 0.8};
    const ReachingParams r{ReachingLaw::proposed, 35.0, 1.5, 0.5, 0.05};
    CHECK(proposed_control(g, r, {}, {0.0, 1.7}) == 0.0);

    // theta = pi/6, theta_dot = 0, upright reference, default pendulum.
    const double theta = std::numbers::pi / 6;
    ErrorFrame fr;
    fr.e = -theta;
    const auto plant = pendulum_f_g(theta, 0.0, PendulumParams{});
    const double u = proposed_control(g, r, fr, plant);
    CHECK(u == doctest::Approx(1329.6499870567204).epsilon(1e-12));
    CHECK(std::abs(u - 1329.6499870567204) < 1e-9);
  }

  TEST_CASE("closed-loop identity, second order") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
      const Sample smp = random_sample(rng, false);
      const double s = surface(smp.gains, smp.frame);
      const double u = proposed_control(smp.gains, smp.reaching, smp.frame, smp.plant);
      const double target = reaching_rate(smp.reaching, s);
      const double got = surface_rate_2nd(smp.gains, smp.frame, smp.plant, u);
      REQUIRE(std::abs(got - target) <= 1e-10 * std::max(1.0, std::abs(target)));

      const double u_eq = equivalent_control(smp.gains, smp.frame, smp.plant);
      REQUIRE(std::abs(surface_rate_2nd(smp.gains, smp.frame, smp.plant, u_eq)) <=
              1e-10 * (std::abs(s) + 1.0) * std::max(1.0, std::abs(target)));
    }
  }

  TEST_CASE("closed-loop identity, first order") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
      const Sample smp = random_sample(rng, true);
      const double s = surface(smp.gains, smp.frame);
      const double u = proposed_control(smp.gains, smp.reaching, smp.frame, smp.plant, 1);
      const double target = reaching_rate(smp.reaching, s);
      const double got = surface_rate_1st(smp.gains, smp.frame, smp.plant, u);
      REQUIRE(std::abs(got - target) <= 1e-10 * std::max(1.0, std::abs(target)));
    }
  }

  TEST_CASE("equivalent plus switching realises the constant-exponential law") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
      const Sample smp = random_sample(rng, false);
      ControllerSpec c;
      c.kind = ControllerKind::pid_smc_eq;
      c.gains = smp.gains;
      c.reaching = smp.reaching;
      const auto out = compute_control(c, smp.frame, smp.plant, 2);
      const double target = reaching_rate(c.effective_reaching(), out.s);
      const double got = surface_rate_2nd(smp.gains, smp.frame, smp.plant, out.u);
      REQUIRE(std::abs(got - target) <= 1e-10 * std::max(1.0, std::abs(target)));
    }
  }

  TEST_CASE("first-order smc") {
    CHECK(first_order_smc_control(5.0, 15.0, {}, {0.0, 2.0}, 0.05) == 0.0);
    ErrorFrame fr;
    fr.e = 0.2;
    CHECK(first_order_surface(5.0, fr) == doctest::Approx(1.0));
    // u = (r'' - f + lambda e_dot + k_sc sat(s)) / g
    fr = {0.01, -0.3, 0.0, 0.0, 0.4};
    const double s = -0.3 + 5.0 * 0.01;
    CHECK(first_order_smc_control(5.0, 15.0, fr, {-2.0, 1.5}, 0.5) ==
          doctest::Approx((0.4 + 2.0 - 1.5 + 15.0 * s / 0.5) / 1.5));
    CHECK(first_order_smc_control(5.0, 15.0, fr, {-2.0, 1.5}, 0.5, true) ==
          doctest::Approx((0.4 + 2.0 - 1.5 - 15.0) / 1.5));
    CHECK_THROWS_AS(first_order_smc_control(5.0, 15.0, fr, {-2.0, 0.0}, 0.5), ControlSingularity);

    // On s = 0 the nominal loop gives e_dot = -lambda e, so e decays as exp(-lambda t).
    const double lambda = 5.0;
    std::array<double, 2> x{0.3, -lambda * 0.3};  // error coordinates (e, e_dot)
    const double dt = 0.001;
    for (int i = 0; i < 1000; ++i) {
      x = rk4_step<2>(
          [&](double, const std::array<double, 2>& z) {
            ErrorFrame f{z[0], z[1]};
            const double u = first_order_smc_control(lambda, 15.0, f, {0.0, 1.0}, 0.05);
            return std::array<double, 2>{z[1], -u};  // e_ddot = -theta_ddot
          },
          x, i * dt, dt);
    }
    CHECK(x[0] == doctest::Approx(0.3 * std::exp(-lambda * 1.0)).epsilon(1e-6));
  }

  TEST_CASE("pid control") {
    CHECK(pid_control({2, 3, 1}, {}) == 0.0);
    CHECK(pid_control({2, 3, 1}, {1.0, 0.5, 0.2}) == doctest::Approx(3.1).epsilon(1e-15));
    double prev = -1e300;
    for (int n = 0; n <= 100; ++n) {
      const double u = pid_control({2, 3, 1}, {1.0, 0.0, n * 0.01});
      CHECK(u > prev);
      prev = u;
    }
  }

  TEST_CASE("switching control") {
    CHECK(switching_control(1.5, 2.0, 0.0) == 0.0);
    CHECK(switching_control(1.5, 2.0, 0.3) == doctest::Approx(-0.75));
    CHECK(switching_control(1.5, -0.5, 0.3) == doctest::Approx(3.0));
    CHECK_THROWS_AS(switching_control(1.5, 0.0, 0.3), ControlSingularity);
  }
}
