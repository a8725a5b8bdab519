#include "smcsim/mpso.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace smcsim {

namespace {

struct Evaluation {
  double fitness = kInfiniteFitness;
  bool failed = false;
};

Evaluation evaluate_one(const Objective& objective, std::span<const double> x) {
  try {
    const double f = objective(x);
    if (std::isfinite(f)) return {f, false};
  } catch (...) {
  }
  return {kInfiniteFitness, true};
}

/// Fitness of every position, computed on up to `threads` workers.
std::vector<Evaluation> evaluate_all(const Objective& objective,
                                     const std::vector<const std::vector<double>*>& positions,
                                     std::size_t threads) {
  std::vector<Evaluation> out(positions.size());
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, positions.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < positions.size(); ++i) {
      out[i] = evaluate_one(objective, *positions[i]);
    }
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < positions.size(); i += workers) {
        out[i] = evaluate_one(objective, *positions[i]);
      }
    });
  }
  pool.clear();  // joins
  return out;
}

void refresh_bests(Swarm& swarm) {
  for (auto& p : swarm.particles) {
    if (p.fitness < p.best_fitness) {
      p.best_fitness = p.fitness;
      p.best_position = p.position;
    }
  }
  for (const auto& p : swarm.particles) {
    if (p.best_fitness < swarm.global_best_fitness) {
      swarm.global_best_fitness = p.best_fitness;
      swarm.global_best = p.best_position;
    }
  }
}

}  // namespace

Coefficients modified_coefficients(std::size_t iteration, std::size_t max_iterations) {
  const double i = static_cast<double>(iteration);
  const double growth = std::exp(0.05 * i);
  return {
      2.0 - std::pow(1.0 + 1.0 / (2.0 * static_cast<double>(max_iterations)), i),
      std::exp(-0.05 * i),
      growth / (1.0 + 0.05 * growth),
  };
}

void SwarmConfig::validate() const {
  if (particles == 0) throw ConfigError("swarm needs at least one particle");
  if (max_iterations == 0) throw ConfigError("max iterations must be > 0");
  if (subpopulations == 0 || particles % subpopulations != 0) {
    throw ConfigError("sub-population count must divide the particle count");
  }
  if (bounds.empty()) throw ConfigError("search box has no dimensions");
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
      throw ConfigError("search bounds need finite lo <= hi");
    }
  }
}

double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void update_particle(Swarm& swarm, std::size_t index, const Coefficients& coeffs,
                     std::span<const Bounds> bounds, Rng& rng, bool stochastic) {
  Particle& p = swarm.particles.at(index);
  for (std::size_t j = 0; j < p.position.size(); ++j) {
    const double r1 = stochastic ? uniform01(rng) : 1.0;
    const double r2 = stochastic ? uniform01(rng) : 1.0;
    double v = coeffs.inertia * p.velocity[j] +
               coeffs.cognitive * r1 * (p.best_position[j] - p.position[j]) +
               coeffs.social * r2 * (swarm.global_best[j] - p.position[j]);
    double x = p.position[j] + v;
    if (x < bounds[j].lo || x > bounds[j].hi) {
      x = std::clamp(x, bounds[j].lo, bounds[j].hi);
      v = 0.0;
    }
    p.velocity[j] = v;
    p.position[j] = x;
  }
}

OptimizeResult optimize(const Objective& objective, const SwarmConfig& config) {
  config.validate();
  const std::size_t dim = config.bounds.size();
  const std::size_t per_sub = config.particles / config.subpopulations;

  std::vector<Swarm> swarms(config.subpopulations);
  std::vector<Rng> rngs;
  rngs.reserve(config.subpopulations);
  for (std::size_t k = 0; k < config.subpopulations; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    rngs.emplace_back(seq);
  }

  for (std::size_t k = 0; k < config.subpopulations; ++k) {
    swarms[k].particles.resize(per_sub);
    for (auto& p : swarms[k].particles) {
      p.position.resize(dim);
      p.velocity.assign(dim, 0.0);
      for (std::size_t j = 0; j < dim; ++j) {
        const Bounds& b = config.bounds[j];
        p.position[j] = b.lo + (b.hi - b.lo) * uniform01(rngs[k]);
      }
      p.best_position = p.position;
    }
  }

  OptimizeResult result;
  const auto evaluate_iteration = [&](std::size_t iteration) {
    std::vector<const std::vector<double>*> positions;
    positions.reserve(config.particles);
    for (const auto& s : swarms) {
      for (const auto& p : s.particles) positions.push_back(&p.position);
    }
    const auto evals = evaluate_all(objective, positions, config.threads);

    std::size_t idx = 0;
    double finite_sum = 0.0;
    std::size_t finite_count = 0;
    for (auto& s : swarms) {
      for (auto& p : s.particles) {
        const Evaluation& ev = evals[idx++];
        p.fitness = ev.fitness;
        result.failed_evaluations += ev.failed ? 1 : 0;
        if (std::isfinite(ev.fitness)) {
          finite_sum += ev.fitness;
          ++finite_count;
        }
      }
      refresh_bests(s);
      s.iteration = iteration;
    }
    result.evaluations += evals.size();

    TraceRow row;
    row.iteration = iteration;
    for (const auto& s : swarms) row.best_fitness = std::min(row.best_fitness, s.global_best_fitness);
    row.mean_fitness = finite_count ? finite_sum / static_cast<double>(finite_count)
                                    : kInfiniteFitness;
    result.trace.push_back(row);
  };

  evaluate_iteration(0);
  for (auto& s : swarms) {
    // Gb may still be unset if every particle failed; fall back to particle 0.
    if (s.global_best.empty()) s.global_best = s.particles.front().position;
  }

  for (std::size_t i = 0; i < config.max_iterations; ++i) {
    const Coefficients coeffs = config.variant == PsoVariant::modified
                                    ? modified_coefficients(i, config.max_iterations)
                                    : config.standard_coefficients;
    for (std::size_t k = 0; k < swarms.size(); ++k) {
      for (std::size_t p = 0; p < swarms[k].particles.size(); ++p) {
        update_particle(swarms[k], p, coeffs, config.bounds, rngs[k], config.stochastic);
      }
    }
    evaluate_iteration(i + 1);
  }

  for (const auto& s : swarms) {
    if (result.best_position.empty() || s.global_best_fitness < result.best_fitness) {
      result.best_fitness = s.global_best_fitness;
      result.best_position = s.global_best;
    }
  }
  return result;
}

}  // namespace smcsim
