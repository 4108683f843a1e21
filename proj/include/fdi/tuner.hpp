#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fdi/errors.hpp"

namespace fdi {

struct Interval {
  double lo{0.0}, hi{1.0};
  bool operator==(const Interval&) const = default;
};
using Bounds = std::vector<Interval>;

// Search box of the 48-parameter genome.
Bounds tuning_bounds();

// K = 2 / |2 - c - sqrt(c^2 - 4c)|, c = c1 + c2. Throws ConstraintViolated
// unless c > 4.
double constriction(double c1, double c2);

// Fitness assigned before a particle's first evaluation.
inline constexpr double kUnevaluatedFitness = 1e300;

struct Particle {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> pbest;
  double pbest_fitness{kUnevaluatedFitness};
};

struct PsoParams {
  int swarm_size{30};
  int iterations{200};
  double c1{2.8};
  double c2{1.3};
  Bounds bounds = tuning_bounds();
  std::uint64_t seed{42};

  void validate() const;
};

// Constriction velocity update with two independent U(0,1) draws per
// dimension (cognitive then social), then x += v. Components leaving the box
// are clamped and their velocity zeroed.
Particle update_particle(Particle p, std::span<const double> gbest, double K,
                         double c1, double c2, std::mt19937_64& rng,
                         const Bounds& bounds);

struct GaParams {
  int population{30};
  int max_generations{100};
  int stall_generations{50};
  int elite_count{2};
  double crossover_fraction{0.8};
  double mutation_rate{0.05};
  Bounds bounds = tuning_bounds();
  std::uint64_t seed{42};

  void validate() const;
};

using Evaluator = std::function<double(std::span<const double>)>;

struct HistoryRow {
  int iteration{0};
  double best_fitness{0.0};
  double mean_fitness{0.0};
};

struct TuneResult {
  std::vector<double> best;
  double best_fitness{kUnevaluatedFitness};
  std::vector<HistoryRow> history;
};

class EvaluationFailed : public Error {
 public:
  EvaluationFailed(std::size_t individual, int iteration, const std::string& cause);

  std::size_t individual() const { return individual_; }
  int iteration() const { return iteration_; }

 private:
  std::size_t individual_;
  int iteration_;
};

// Evaluates every point, `jobs` at a time. Evaluations are independent and
// results are stored by index, so the outcome does not depend on `jobs`.
std::vector<double> evaluate_batch(const Evaluator& fitness,
                                   const std::vector<std::vector<double>>& points,
                                   int iteration, int jobs);

// History row 0 is the random initialisation; rows 1..iterations follow each
// synchronous swarm update.
TuneResult pso_tune(const Evaluator& fitness, const PsoParams& params,
                    int jobs = 1);

// Rank-scaled stochastic universal selection, elitism, intermediate
// crossover and uniform mutation. Row 0 is the initial population. Stops at
// max_generations evaluated generations or after stall_generations without
// improvement.
TuneResult ga_tune(const Evaluator& fitness, const GaParams& params,
                   int jobs = 1);

}  // namespace fdi
