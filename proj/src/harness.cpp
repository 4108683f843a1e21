#include "fdi/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fdi/errors.hpp"
#include "fdi/format.hpp"
#include "fdi/parallel.hpp"

namespace fdi {

namespace {

constexpr double kTimeTolerance = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view classification_name(Classification c) {
  switch (c) {
    case Classification::Proper: return "proper";
    case Classification::Missed: return "missed";
    case Classification::Bad: return "bad";
    case Classification::FalseAlarm: return "false_alarm";
  }
  return "unknown";
}

VariableSet DetectionReport::flagged() const {
  VariableSet s;
  for (std::size_t v = 0; v < kVariableCount; ++v) s.set(v, first_flag[v].has_value());
  return s;
}

PreparedScenario prepare(const FaultScenario& scenario, const PlantParams& plant,
                         const ResidualOptions& options) {
  try {
    scenario.validate();
    Trace trace = run(scenario, plant);
    return {scenario, residual_trace(trace, plant, scenario.dt, options)};
  } catch (const SimulationDiverged& e) {
    throw SimulationDiverged(e.variable(), e.time(), "scenario " + scenario.id);
  } catch (const ConfigError& e) {
    throw ConfigError("scenario " + scenario.id + ": " + e.what());
  }
}

std::vector<PreparedScenario> prepare_suite(const std::vector<FaultScenario>& suite,
                                            const PlantParams& plant,
                                            const ResidualOptions& options, int jobs) {
  std::vector<PreparedScenario> out(suite.size());
  parallel_for(suite.size(), jobs,
               [&](std::size_t i) { out[i] = prepare(suite[i], plant, options); });
  return out;
}

DetectionStep FuzzyDetectorModel::step(const ResidualVector& r) {
  return detect(r, *cfg_, state_);
}

std::array<double, kVariableCount> onset_times(const FaultScenario& scenario) {
  std::array<double, kVariableCount> onset;
  onset.fill(kNaN);
  for (const FaultEvent& e : scenario.events) {
    double& t = onset[index(e.target)];
    t = std::isnan(t) ? e.start : std::min(t, e.start);
  }
  return onset;
}

DetectionReport classify(const FaultScenario& scenario, const FlagTimes& first_flag) {
  DetectionReport report;
  report.scenario_id = scenario.id;
  report.injected = scenario.injected();
  report.first_flag = first_flag;

  const std::array<double, kVariableCount> onset = onset_times(scenario);
  VariableSet valid;
  bool extras = false;
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    if (!first_flag[v]) continue;
    if (report.injected.test(v) && *first_flag[v] >= onset[v] - kTimeTolerance) {
      valid.set(v);
      report.delays[v] = std::max(0.0, *first_flag[v] - onset[v]);
    } else {
      extras = true;
    }
  }

  if (extras) {
    report.classification = Classification::FalseAlarm;
  } else if (valid == report.injected) {
    report.classification = Classification::Proper;
  } else if (valid.none()) {
    report.classification = Classification::Bad;
  } else {
    report.classification = Classification::Missed;
  }
  return report;
}

DetectionReport run_detector(DetectorModel& model, const PreparedScenario& prepared) {
  FlagTimes first_flag;
  for (const ResidualVector& r : prepared.residuals) {
    const DetectionStep s = model.step(r);
    for (std::size_t v = 0; v < kVariableCount; ++v) {
      if (s.flags.test(v) && !first_flag[v]) first_flag[v] = r.t;
    }
  }
  return classify(prepared.scenario, first_flag);
}

SuiteMetrics aggregate(const std::vector<DetectionReport>& reports) {
  SuiteMetrics m;
  m.scenarios = reports.size();
  double delay_sum = 0.0;
  std::size_t delay_count = 0;
  for (const DetectionReport& r : reports) {
    switch (r.classification) {
      case Classification::Proper:
        ++m.proper;
        for (const auto& d : r.delays) {
          if (d) {
            delay_sum += *d;
            ++delay_count;
          }
        }
        break;
      case Classification::Missed: ++m.missed; break;
      case Classification::Bad: ++m.bad; break;
      case Classification::FalseAlarm: ++m.false_alarm; break;
    }
  }
  m.proper_rate = m.scenarios == 0 ? 0.0
                                   : static_cast<double>(m.proper) /
                                         static_cast<double>(m.scenarios);
  m.mean_delay = delay_count == 0 ? kNaN : delay_sum / static_cast<double>(delay_count);
  return m;
}

Evaluation evaluate_prepared(const DetectorFactory& factory,
                             const std::vector<PreparedScenario>& suite, int jobs) {
  Evaluation out;
  out.reports.resize(suite.size());
  parallel_for(suite.size(), jobs, [&](std::size_t i) {
    std::unique_ptr<DetectorModel> model = factory(suite[i]);
    out.reports[i] = run_detector(*model, suite[i]);
  });
  out.metrics = aggregate(out.reports);
  return out;
}

Evaluation evaluate_prepared(const DetectorConfig& cfg,
                             const std::vector<PreparedScenario>& suite, int jobs) {
  cfg.validate();
  return evaluate_prepared(
      [&cfg](const PreparedScenario&) { return std::make_unique<FuzzyDetectorModel>(cfg); },
      suite, jobs);
}

Evaluation evaluate(const DetectorConfig& cfg, const std::vector<FaultScenario>& suite,
                    const PlantParams& plant, int jobs) {
  cfg.validate();
  return evaluate_prepared(cfg, prepare_suite(suite, plant, {}, jobs), jobs);
}

void SuiteSpec::validate() const {
  if (multiplicity_weights.empty() || multiplicity_weights.size() > kVariableCount + 1) {
    throw ConfigError("multiplicity weights must cover 0..7 faults at most");
  }
  double total = 0.0;
  for (double w : multiplicity_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("multiplicity weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("multiplicity weights must not all be zero");
  if (!(magnitude.lo > 0.0 && magnitude.lo <= magnitude.hi)) {
    throw ConfigError("magnitude range must satisfy 0 < lo <= hi");
  }
  if (!(amplitude_floor > 0.0)) throw ConfigError("amplitude_floor must be positive");
  if (!(dt > 0.0) || !(duration >= dt)) {
    throw ConfigError("suite timing requires dt > 0 and duration >= dt");
  }
  if (!(onset.lo >= 0.0 && onset.lo <= onset.hi && onset.hi <= duration)) {
    throw ConfigError("onset range must lie within [0, duration]");
  }
  if (!(noise_std_R >= 0.0) || !(noise_std_C >= 0.0)) {
    throw ConfigError("noise levels must be non-negative");
  }
  if (!(ramp_fraction >= 0.0 && ramp_fraction <= 1.0)) {
    throw ConfigError("ramp_fraction must lie in [0, 1]");
  }
  if (!(ramp_time.lo > 0.0 && ramp_time.lo <= ramp_time.hi)) {
    throw ConfigError("ramp time range must satisfy 0 < lo <= hi");
  }
  if (compensation_period < 0) throw ConfigError("compensation_period must be >= 0");
}

std::array<FaultEvent, 2> compensation_pair(double de2_magnitude, double start,
                                            const PlantParams& plant) {
  // The ARRs are affine in the frame, so unit responses at zero derivative
  // give the steady-state coefficients.
  const std::array<double, 3> still{};
  const MeasurementFrame zero{};
  auto arr2_gain = [&](Variable v) {
    MeasurementFrame f{};
    f[v] = 1.0;
    return evaluate_arrs(f, still, plant)[1] - evaluate_arrs(zero, still, plant)[1];
  };
  const double df2_magnitude = -de2_magnitude * arr2_gain(Variable::De2) /
                               arr2_gain(Variable::Df2);
  return {FaultEvent{Variable::De2, start, de2_magnitude, FaultProfile::Step, 0.0},
          FaultEvent{Variable::Df2, start, df2_magnitude, FaultProfile::Step, 0.0}};
}

std::vector<FaultScenario> generate_suite(int n, std::uint64_t seed, const SuiteSpec& spec,
                                          const PlantParams& plant) {
  if (n < 1) throw ConfigError("suite size must be >= 1");
  spec.validate();
  plant.validate();

  const InputSchedule inputs;
  const Inputs u0 = inputs.at(0.0);
  const MeasurementFrame operating =
      true_frame(equilibrium(u0, plant), u0, plant, PlantMode::Linear);
  auto amplitude = [&](Variable v) {
    return std::max(std::abs(operating[v]), spec.amplitude_floor);
  };

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](Range r) {
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  // Onsets sit on the sample grid so delays are whole multiples of dt.
  auto onset = [&] { return std::round(uniform(spec.onset) / spec.dt) * spec.dt; };
  auto signed_magnitude = [&](Variable v) {
    const double m = uniform(spec.magnitude) * amplitude(v);
    return std::bernoulli_distribution(0.5)(rng) ? m : -m;
  };
  std::discrete_distribution<std::size_t> multiplicity(spec.multiplicity_weights.begin(),
                                                       spec.multiplicity_weights.end());
  const bool doubles_possible =
      spec.multiplicity_weights.size() > 2 && spec.multiplicity_weights[2] > 0.0;

  std::vector<FaultScenario> suite;
  suite.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    FaultScenario s;
    std::ostringstream id;
    id << 's' << std::setw(3) << std::setfill('0') << i;
    s.id = id.str();
    s.seed = rng();
    s.duration = spec.duration;
    s.dt = spec.dt;
    s.noise_std_R = spec.noise_std_R;
    s.noise_std_C = spec.noise_std_C;
    s.mode = spec.mode;

    const bool compensation = doubles_possible && spec.compensation_period > 0 &&
                              i % spec.compensation_period == spec.compensation_period - 1;
    if (compensation) {
      const double m = signed_magnitude(Variable::De2);
      const double start = onset();
      const auto pair = compensation_pair(m, start, plant);
      s.events.assign(pair.begin(), pair.end());
    } else {
      const std::size_t k = multiplicity(rng);
      std::array<Variable, kVariableCount> pool = kAllVariables;
      std::shuffle(pool.begin(), pool.end(), rng);
      std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
      const double start = onset();
      for (std::size_t j = 0; j < k; ++j) {
        FaultEvent e;
        e.target = pool[j];
        e.start = start;
        e.magnitude = signed_magnitude(e.target);
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < spec.ramp_fraction) {
          e.profile = FaultProfile::Ramp;
          e.slope = std::abs(e.magnitude) / uniform(spec.ramp_time);
        }
        s.events.push_back(e);
      }
    }
    suite.push_back(std::move(s));
  }
  return suite;
}

std::vector<NamedEvaluation> compare(const std::vector<NamedConfig>& configs,
                                     const std::vector<FaultScenario>& suite,
                                     const PlantParams& plant, int jobs) {
  if (configs.size() < 2) throw ConfigError("compare needs at least two configurations");
  for (const NamedConfig& c : configs) {
    try {
      c.config.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(c.name + ": " + e.what());
    }
  }
  const std::vector<PreparedScenario> prepared = prepare_suite(suite, plant, {}, jobs);
  std::vector<NamedEvaluation> rows;
  rows.reserve(configs.size());
  for (const NamedConfig& c : configs) {
    rows.push_back({c.name, evaluate_prepared(c.config, prepared, jobs)});
  }
  return rows;
}

std::string metrics_csv(const std::vector<NamedEvaluation>& rows) {
  std::string out = "config,scenarios,proper,missed,bad,false_alarm,proper_rate,mean_delay\n";
  for (const NamedEvaluation& row : rows) {
    const SuiteMetrics& m = row.evaluation.metrics;
    out += row.name + ',' + std::to_string(m.scenarios) + ',' + std::to_string(m.proper) +
           ',' + std::to_string(m.missed) + ',' + std::to_string(m.bad) + ',' +
           std::to_string(m.false_alarm) + ',' + format_double(m.proper_rate) + ',' +
           format_double(m.mean_delay) + '\n';
  }
  return out;
}

std::string comparison_table(const std::vector<NamedEvaluation>& rows) {
  std::size_t name_width = 6;
  for (const NamedEvaluation& row : rows) name_width = std::max(name_width, row.name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width)) << "config" << std::right
      << std::setw(11) << "scenarios" << std::setw(8) << "proper" << std::setw(8) << "missed"
      << std::setw(6) << "bad" << std::setw(13) << "false_alarm" << std::setw(13)
      << "proper_rate" << std::setw(12) << "mean_delay" << '\n';
  for (const NamedEvaluation& row : rows) {
    const SuiteMetrics& m = row.evaluation.metrics;
    out << std::left << std::setw(static_cast<int>(name_width)) << row.name << std::right
        << std::setw(11) << m.scenarios << std::setw(8) << m.proper << std::setw(8)
        << m.missed << std::setw(6) << m.bad << std::setw(13) << m.false_alarm
        << std::setw(13) << format_fixed(m.proper_rate, 3) << std::setw(12)
        << format_fixed(m.mean_delay, 2) << '\n';
  }
  return out.str();
}

}  // namespace fdi
