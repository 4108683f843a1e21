#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdi/fuzzy.hpp"
#include "fdi/plant.hpp"
#include "fdi/residuals.hpp"

namespace fdi {

enum class Classification { Proper, Missed, Bad, FalseAlarm };

// "proper", "missed", "bad", "false_alarm".
std::string_view classification_name(Classification c);

using FlagTimes = std::array<std::optional<double>, kVariableCount>;

struct DetectionReport {
  std::string scenario_id;
  VariableSet injected;
  FlagTimes first_flag;  // first time each variable was flagged
  Classification classification{Classification::Proper};
  FlagTimes delays;      // injected and flagged at or after onset only

  VariableSet flagged() const;
};

struct SuiteMetrics {
  std::size_t scenarios{0};
  std::size_t proper{0}, missed{0}, bad{0}, false_alarm{0};
  double proper_rate{0.0};
  // Mean delay over faults of properly decided scenarios; NaN when there
  // are none.
  double mean_delay{0.0};
};

struct Evaluation {
  SuiteMetrics metrics;
  std::vector<DetectionReport> reports;
};

// A scenario with its residuals computed once; detection can then be
// repeated cheaply for many detector configurations.
struct PreparedScenario {
  FaultScenario scenario;
  ResidualTrace residuals;
};

PreparedScenario prepare(const FaultScenario& scenario, const PlantParams& plant,
                         const ResidualOptions& options = {});

std::vector<PreparedScenario> prepare_suite(const std::vector<FaultScenario>& suite,
                                            const PlantParams& plant,
                                            const ResidualOptions& options = {},
                                            int jobs = 1);

// Stateful per-scenario detector. Implementations other than the fuzzy one
// exist for tests.
class DetectorModel {
 public:
  virtual ~DetectorModel() = default;
  virtual DetectionStep step(const ResidualVector& r) = 0;
};

class FuzzyDetectorModel : public DetectorModel {
 public:
  explicit FuzzyDetectorModel(const DetectorConfig& cfg) : cfg_(&cfg) {}
  DetectionStep step(const ResidualVector& r) override;

 private:
  const DetectorConfig* cfg_;
  DetectorState state_;
};

using DetectorFactory =
    std::function<std::unique_ptr<DetectorModel>(const PreparedScenario&)>;

// Earliest onset per variable, NaN for variables without events.
std::array<double, kVariableCount> onset_times(const FaultScenario& scenario);

// A flag raised on an injected variable before its onset counts as an extra.
// Extras make the scenario a false alarm; otherwise an exact match is
// proper, no flags at all is bad and a strict subset is missed. Fault-free
// scenarios are proper exactly when nothing is flagged.
DetectionReport classify(const FaultScenario& scenario, const FlagTimes& first_flag);

DetectionReport run_detector(DetectorModel& model, const PreparedScenario& prepared);

SuiteMetrics aggregate(const std::vector<DetectionReport>& reports);

Evaluation evaluate_prepared(const DetectorFactory& factory,
                             const std::vector<PreparedScenario>& suite, int jobs = 1);

Evaluation evaluate_prepared(const DetectorConfig& cfg,
                             const std::vector<PreparedScenario>& suite, int jobs = 1);

// Simulates every scenario, streams residuals through the detector and
// classifies the outcome.
Evaluation evaluate(const DetectorConfig& cfg, const std::vector<FaultScenario>& suite,
                    const PlantParams& plant, int jobs = 1);

struct Range {
  double lo{0.0}, hi{1.0};
};

struct SuiteSpec {
  // Relative weight of k simultaneous faults at index k (0..7).
  std::vector<double> multiplicity_weights{0.0, 0.4, 0.4, 0.2};
  // Magnitude relative to the target's operating amplitude; the sign is
  // drawn separately.
  Range magnitude{0.4, 2.0};
  double amplitude_floor{0.5};
  Range onset{20.0, 40.0};
  double duration{80.0};
  double dt{0.1};
  double noise_std_R{0.05};
  double noise_std_C{0.05};
  PlantMode mode{PlantMode::Linear};
  double ramp_fraction{0.3};
  Range ramp_time{5.0, 15.0};
  // Every period-th scenario is replaced by a {De2, Df2} pair that cancels
  // in ARR2 (0 disables). Requires a nonzero double-fault weight.
  int compensation_period{25};

  void validate() const;
};

// {De2, Df2} step pair whose steady-state ARR2 contributions cancel.
std::array<FaultEvent, 2> compensation_pair(double de2_magnitude, double start,
                                            const PlantParams& plant);

// Deterministic for a given (n, seed, spec, plant). Throws ConfigError on an
// infeasible spec.
std::vector<FaultScenario> generate_suite(int n, std::uint64_t seed,
                                          const SuiteSpec& spec = {},
                                          const PlantParams& plant = {});

struct NamedEvaluation {
  std::string name;
  Evaluation evaluation;
};

struct NamedConfig {
  std::string name;
  DetectorConfig config;
};

// Requires at least two configurations.
std::vector<NamedEvaluation> compare(const std::vector<NamedConfig>& configs,
                                     const std::vector<FaultScenario>& suite,
                                     const PlantParams& plant, int jobs = 1);

// Header `config,scenarios,proper,missed,bad,false_alarm,proper_rate,mean_delay`.
std::string metrics_csv(const std::vector<NamedEvaluation>& rows);

// Aligned plain-text table of the same columns.
std::string comparison_table(const std::vector<NamedEvaluation>& rows);

}  // namespace fdi
