#include "fdi/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "fdi/fuzzy.hpp"
#include "fdi/parallel.hpp"

namespace fdi {

Bounds tuning_bounds() {
  Bounds b;
  b.reserve(kParameterCount);
  for (std::size_t i = 0; i < kArrCount; ++i) {
    b.insert(b.end(), {{0.0, 1.0}, {0.0, 1.5}, {1.0, 5.0}, {1.5, 5.0}});
  }
  for (std::size_t j = 0; j < kVariableCount; ++j) {
    b.insert(b.end(), {{-5.0, 0.0}, {-0.5, 0.0}, {0.0, 5.0}, {0.5, 5.0}});
  }
  return b;
}

double constriction(double c1, double c2) {
  const double c = c1 + c2;
  if (!(c > 4.0)) {
    throw ConstraintViolated("constriction factor requires c = c1 + c2 > 4, got " +
                             std::to_string(c));
  }
  return 2.0 / std::abs(2.0 - c - std::sqrt(c * c - 4.0 * c));
}

namespace {

void validate_bounds(const Bounds& bounds) {
  if (bounds.empty()) throw ConfigError("search bounds must not be empty");
  for (const Interval& iv : bounds) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw ConfigError("search bounds must satisfy lo <= hi");
    }
  }
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> random_point(const Bounds& bounds, std::mt19937_64& rng) {
  std::vector<double> x(bounds.size());
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    x[d] = uniform(rng, bounds[d].lo, bounds[d].hi);
  }
  return x;
}

}  // namespace

void PsoParams::validate() const {
  if (swarm_size < 2) throw ConfigError("swarm_size must be >= 2");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw ConstraintViolated("c1 and c2 must be positive");
  }
  constriction(c1, c2);
  validate_bounds(bounds);
}

void GaParams::validate() const {
  if (population < 2) throw ConfigError("population must be >= 2");
  if (max_generations < 1) throw ConfigError("max_generations must be >= 1");
  if (stall_generations < 1 || stall_generations > max_generations) {
    throw ConfigError("stall_generations must lie in [1, max_generations]");
  }
  if (elite_count < 0 || elite_count >= population) {
    throw ConfigError("elite_count must lie in [0, population)");
  }
  if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
    throw ConfigError("crossover_fraction must lie in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("mutation_rate must lie in [0, 1]");
  }
  validate_bounds(bounds);
}

Particle update_particle(Particle p, std::span<const double> gbest, double K,
                         double c1, double c2, std::mt19937_64& rng,
                         const Bounds& bounds) {
  for (std::size_t d = 0; d < p.x.size(); ++d) {
    const double r1 = uniform(rng, 0.0, 1.0);
    const double r2 = uniform(rng, 0.0, 1.0);
    p.v[d] = K * (p.v[d] + c1 * r1 * (p.pbest[d] - p.x[d]) +
                  c2 * r2 * (gbest[d] - p.x[d]));
    p.x[d] += p.v[d];
    if (p.x[d] < bounds[d].lo) {
      p.x[d] = bounds[d].lo;
      p.v[d] = 0.0;
    } else if (p.x[d] > bounds[d].hi) {
      p.x[d] = bounds[d].hi;
      p.v[d] = 0.0;
    }
  }
  return p;
}

EvaluationFailed::EvaluationFailed(std::size_t individual, int iteration,
                                   const std::string& cause)
    : Error("fitness evaluation failed for individual " +
            std::to_string(individual) + " at iteration " +
            std::to_string(iteration) + ": " + cause),
      individual_(individual),
      iteration_(iteration) {}

std::vector<double> evaluate_batch(const Evaluator& fitness,
                                   const std::vector<std::vector<double>>& points,
                                   int iteration, int jobs) {
  std::vector<double> out(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    try {
      out[i] = fitness(points[i]);
    } catch (const std::exception& e) {
      throw EvaluationFailed(i, iteration, e.what());
    }
  });
  return out;
}

TuneResult pso_tune(const Evaluator& fitness, const PsoParams& params, int jobs) {
  params.validate();
  const double K = constriction(params.c1, params.c2);
  const Bounds& bounds = params.bounds;
  std::mt19937_64 rng(params.seed);

  std::vector<Particle> swarm(static_cast<std::size_t>(params.swarm_size));
  for (Particle& p : swarm) {
    p.x = random_point(bounds, rng);
    p.v.resize(bounds.size());
    for (std::size_t d = 0; d < bounds.size(); ++d) {
      const double half = (bounds[d].hi - bounds[d].lo) / 2.0;
      p.v[d] = uniform(rng, -half, half);
    }
    p.pbest = p.x;
  }

  TuneResult result;
  auto evaluate_swarm = [&](int iteration) {
    std::vector<std::vector<double>> positions;
    positions.reserve(swarm.size());
    for (const Particle& p : swarm) positions.push_back(p.x);
    const std::vector<double> f = evaluate_batch(fitness, positions, iteration, jobs);
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      if (f[i] < swarm[i].pbest_fitness) {
        swarm[i].pbest_fitness = f[i];
        swarm[i].pbest = swarm[i].x;
      }
      if (swarm[i].pbest_fitness < result.best_fitness) {
        result.best_fitness = swarm[i].pbest_fitness;
        result.best = swarm[i].pbest;
      }
    }
    result.history.push_back({iteration, result.best_fitness, mean_of(f)});
  };

  evaluate_swarm(0);
  for (int it = 1; it <= params.iterations; ++it) {
    const std::vector<double> gbest = result.best;
    for (Particle& p : swarm) {
      p = update_particle(std::move(p), gbest, K, params.c1, params.c2, rng, bounds);
    }
    evaluate_swarm(it);
  }
  return result;
}

namespace {

// Stochastic universal sampling over rank-scaled expectations; `order` lists
// individuals best first.
std::vector<std::size_t> select_parents(const std::vector<std::size_t>& order,
                                        std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> parents;
  if (count == 0) return parents;
  std::vector<double> weight(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    weight[r] = 1.0 / std::sqrt(static_cast<double>(r + 1));
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  const double stride = total / static_cast<double>(count);
  double pointer = uniform(rng, 0.0, stride);
  double cumulative = weight[0];
  std::size_t r = 0;
  parents.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    while (pointer > cumulative && r + 1 < order.size()) cumulative += weight[++r];
    parents.push_back(order[r]);
    pointer += stride;
  }
  std::shuffle(parents.begin(), parents.end(), rng);
  return parents;
}

}  // namespace

TuneResult ga_tune(const Evaluator& fitness, const GaParams& params, int jobs) {
  params.validate();
  const Bounds& bounds = params.bounds;
  const std::size_t pop_size = static_cast<std::size_t>(params.population);
  std::mt19937_64 rng(params.seed);

  std::vector<std::vector<double>> population;
  population.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) population.push_back(random_point(bounds, rng));

  const std::size_t elites = static_cast<std::size_t>(params.elite_count);
  const std::size_t rest = pop_size - elites;
  const std::size_t crossover_children = static_cast<std::size_t>(
      std::lround(params.crossover_fraction * static_cast<double>(rest)));
  const std::size_t mutation_children = rest - crossover_children;

  TuneResult result;
  int stall = 0;
  for (int gen = 0; gen < params.max_generations; ++gen) {
    const std::vector<double> f = evaluate_batch(fitness, population, gen, jobs);
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&f](std::size_t a, std::size_t b) { return f[a] < f[b]; });

    if (f[order[0]] < result.best_fitness) {
      result.best_fitness = f[order[0]];
      result.best = population[order[0]];
      stall = 0;
    } else {
      ++stall;
    }
    result.history.push_back({gen, result.best_fitness, mean_of(f)});
    if (stall >= params.stall_generations || gen + 1 == params.max_generations) break;

    std::vector<std::vector<double>> next;
    next.reserve(pop_size);
    for (std::size_t e = 0; e < elites; ++e) next.push_back(population[order[e]]);

    const std::vector<std::size_t> parents =
        select_parents(order, 2 * crossover_children + mutation_children, rng);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < crossover_children; ++k) {
      const std::vector<double>& p1 = population[parents[cursor++]];
      const std::vector<double>& p2 = population[parents[cursor++]];
      std::vector<double> child(bounds.size());
      for (std::size_t d = 0; d < bounds.size(); ++d) {
        const double u = uniform(rng, -0.25, 1.25);
        child[d] = std::clamp(p1[d] + u * (p2[d] - p1[d]), bounds[d].lo, bounds[d].hi);
      }
      next.push_back(std::move(child));
    }
    for (std::size_t k = 0; k < mutation_children; ++k) {
      std::vector<double> child = population[parents[cursor++]];
      for (std::size_t d = 0; d < bounds.size(); ++d) {
        if (uniform(rng, 0.0, 1.0) < params.mutation_rate) {
          child[d] = uniform(rng, bounds[d].lo, bounds[d].hi);
        }
      }
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }
  return result;
}

}  // namespace fdi
