#pragma once

#include <span>
#include <vector>

#include "fdi/fuzzy.hpp"
#include "fdi/harness.hpp"
#include "fdi/plant.hpp"

namespace fdi {

struct FitnessReport {
  double error_rate{0.0};  // improper decisions / scenarios
  double mean_delay{0.0};  // NaN when nothing was properly detected
  std::vector<DetectionReport> per_scenario;
};

// Weight of the normalised delay in the scalar fitness. It is small enough
// that a single extra proper decision always outweighs any delay change.
inline constexpr double kDelayWeight = 1e-3;

// error_rate + kDelayWeight * min(1, mean_delay / horizon); an undefined
// delay costs the full weight.
double scalar_fitness(const FitnessReport& report, double horizon);

// Scores genomes against a suite whose residuals are computed once up front.
// Rule base, beta, threshold and debounce come from `base`.
class FitnessEvaluator {
 public:
  FitnessEvaluator(std::vector<PreparedScenario> suite, DetectorConfig base = {});

  FitnessReport report(std::span<const double> x) const;
  double operator()(std::span<const double> x) const;

  const std::vector<PreparedScenario>& suite() const { return suite_; }

 private:
  std::vector<PreparedScenario> suite_;
  DetectorConfig base_;
  double horizon_;
};

FitnessReport fitness(std::span<const double> x, const std::vector<FaultScenario>& suite,
                      const PlantParams& plant);

}  // namespace fdi
