#pragma once

// Particle swarm optimisation with time-scheduled coefficients.
//
// The swarm is split into independent sub-populations (no migration); each
// keeps its own global best and the best over all of them is reported.
// Fitness evaluations inside an iteration may run on several threads; results
// are reduced in particle-index order so a seed fully determines the run.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "smcsim/error.hpp"

namespace smcsim {

inline constexpr double kInfiniteFitness = std::numeric_limits<double>::infinity();

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Inertia weight and the cognitive / social acceleration coefficients.
struct Coefficients {
  double inertia = 1.0;
  double cognitive = 1.0;
  double social = 1.0;
};

/// w = 2 - (1 + 1/(2 k_max))^i, C1 = exp(-0.05 i),
/// C2 = exp(0.05 i) / (1 + 0.05 exp(0.05 i)).
Coefficients modified_coefficients(std::size_t iteration, std::size_t max_iterations);

enum class PsoVariant { standard, modified };

struct SwarmConfig {
  std::size_t particles = 50;
  std::size_t subpopulations = 5;
  std::size_t max_iterations = 90;
  std::vector<Bounds> bounds;
  std::uint64_t seed = 1;
  PsoVariant variant = PsoVariant::modified;
  /// r1, r2 ~ U(0,1) per dimension; false uses r1 = r2 = 1.
  bool stochastic = true;
  /// Used by PsoVariant::standard.
  Coefficients standard_coefficients{0.7, 1.5, 1.5};
  std::size_t threads = 1;

  /// Throws ConfigError. A dimension with lo == hi is allowed (pinned).
  void validate() const;
};

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double fitness = kInfiniteFitness;
  double best_fitness = kInfiniteFitness;
};

struct Swarm {
  std::vector<Particle> particles;
  std::vector<double> global_best;
  double global_best_fitness = kInfiniteFitness;
  std::size_t iteration = 0;
};

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng) noexcept;

/// V <- w V + C1 r1 (Pb - X) + C2 r2 (Gb - X); X <- X + V; then X is clamped
/// into the box and the velocity zeroed on clamped dimensions.
void update_particle(Swarm& swarm, std::size_t index, const Coefficients& coeffs,
                     std::span<const Bounds> bounds, Rng& rng, bool stochastic);

using Objective = std::function<double(std::span<const double>)>;

struct TraceRow {
  std::size_t iteration = 0;
  double best_fitness = kInfiniteFitness;
  double mean_fitness = kInfiniteFitness;  // over finite fitnesses this iteration
};

struct OptimizeResult {
  std::vector<double> best_position;
  double best_fitness = kInfiniteFitness;
  std::vector<TraceRow> trace;  // row 0 is the initial population
  std::size_t evaluations = 0;
  std::size_t failed_evaluations = 0;  // non-finite or throwing objective
};

/// Objective failures (exceptions, non-finite values) count as +inf fitness.
OptimizeResult optimize(const Objective& objective, const SwarmConfig& config);

class TuningFailed : public Error {
 public:
  TuningFailed(const std::string& message, std::vector<TraceRow> trace)
      : Error(ErrorKind::tuning_failed, message), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

}  // namespace smcsim
