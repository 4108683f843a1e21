#include "fdi/fitness.hpp"

#include <algorithm>
#include <cmath>

#include "fdi/errors.hpp"

namespace fdi {

double scalar_fitness(const FitnessReport& report, double horizon) {
  const double delay_term = std::isnan(report.mean_delay) || !(horizon > 0.0)
                                ? 1.0
                                : std::min(1.0, report.mean_delay / horizon);
  return report.error_rate + kDelayWeight * delay_term;
}

FitnessEvaluator::FitnessEvaluator(std::vector<PreparedScenario> suite, DetectorConfig base)
    : suite_(std::move(suite)), base_(std::move(base)), horizon_(0.0) {
  if (suite_.empty()) throw ConfigError("fitness suite must not be empty");
  base_.validate();
  for (const PreparedScenario& p : suite_) {
    horizon_ = std::max(horizon_, p.scenario.duration);
  }
}

FitnessReport FitnessEvaluator::report(std::span<const double> x) const {
  const DetectorConfig cfg = params_to_config(x, base_).config;
  Evaluation ev = evaluate_prepared(cfg, suite_, 1);
  FitnessReport out;
  out.error_rate = static_cast<double>(ev.metrics.scenarios - ev.metrics.proper) /
                   static_cast<double>(ev.metrics.scenarios);
  out.mean_delay = ev.metrics.mean_delay;
  out.per_scenario = std::move(ev.reports);
  return out;
}

double FitnessEvaluator::operator()(std::span<const double> x) const {
  return scalar_fitness(report(x), horizon_);
}

FitnessReport fitness(std::span<const double> x, const std::vector<FaultScenario>& suite,
                      const PlantParams& plant) {
  return FitnessEvaluator(prepare_suite(suite, plant)).report(x);
}

}  // namespace fdi
