#include "fdi/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdi/errors.hpp"

namespace fdi {

namespace {

constexpr double kRepairGap = 1e-6;

std::string arr_name(std::size_t i) { return "ARR" + std::to_string(i + 1); }

// Clipped area of a unit ramp of width w cut at height h.
double ramp_mass(double h, double w) { return w * h * (1.0 - h / 2.0); }

}  // namespace

void InputPartition::validate() const {
  const bool ok = a1 > 0.0 && a1 < a2 && a2 <= a3 && a3 < a4 && a4 <= beta &&
                  std::isfinite(beta);
  if (!ok) {
    throw ConfigError(
        "input partition must satisfy 0 < a1 < a2 <= a3 < a4 <= beta");
  }
}

void OutputPartition::validate() const {
  const bool ok = a < b && b <= 0.0 && 0.0 <= c && c < d && std::isfinite(a) &&
                  std::isfinite(d);
  if (!ok) throw ConfigError("output partition must satisfy a < b <= 0 <= c < d");
}

double trapezoid(double x, double a, double b, double c, double d) {
  if (x >= b && x <= c) return 1.0;
  if (x <= a || x >= d) return 0.0;
  if (x < b) return (x - a) / (b - a);
  return (d - x) / (d - c);
}

Memberships fuzzify(double r, const InputPartition& p) {
  const double x = std::clamp(r, -p.beta, p.beta);
  Memberships m{};
  m[static_cast<std::size_t>(Label::NB)] =
      trapezoid(x, -p.beta, -p.beta, -p.a4, -p.a3);
  m[static_cast<std::size_t>(Label::N)] = trapezoid(x, -p.a4, -p.a3, -p.a2, -p.a1);
  m[static_cast<std::size_t>(Label::Z)] = trapezoid(x, -p.a2, -p.a1, p.a1, p.a2);
  m[static_cast<std::size_t>(Label::P)] = trapezoid(x, p.a1, p.a2, p.a3, p.a4);
  m[static_cast<std::size_t>(Label::PB)] = trapezoid(x, p.a3, p.a4, p.beta, p.beta);
  return m;
}

double constraint_degree(Constraint c, const Memberships& m) {
  switch (c) {
    case Constraint::NB: return degree(m, Label::NB);
    case Constraint::N: return degree(m, Label::N);
    case Constraint::Z: return degree(m, Label::Z);
    case Constraint::P: return degree(m, Label::P);
    case Constraint::PB: return degree(m, Label::PB);
    case Constraint::NonZ:
      return std::max({degree(m, Label::NB), degree(m, Label::N),
                       degree(m, Label::P), degree(m, Label::PB)});
    case Constraint::Any: return 1.0;
  }
  return 0.0;
}

std::size_t Rule::compensated() const {
  return static_cast<std::size_t>(
      std::count(premise.begin(), premise.end(), Constraint::Any));
}

void RuleBase::validate() const {
  if (max_fault_order < 1 || max_fault_order > static_cast<int>(kVariableCount)) {
    throw ConfigError("max_fault_order must lie in [1, 7]");
  }
  VariableSet has_alarm, has_ok;
  for (const Rule& rule : rules) {
    for (Constraint c : rule.premise) {
      if (static_cast<int>(c) > static_cast<int>(Constraint::Any)) {
        throw ConfigError("rule premise holds an unknown constraint");
      }
    }
    has_alarm |= rule.alarm;
    has_ok |= rule.ok;
  }
  for (Variable v : kAllVariables) {
    if (!has_alarm.test(index(v)) || !has_ok.test(index(v))) {
      throw ConfigError("rule base must conclude both AL and OK for " +
                        std::string(variable_name(v)));
    }
  }
}

RuleBase build_rulebase(const SignatureMatrix& sig, int max_fault_order,
                        InferenceMode mode) {
  if (max_fault_order < 1 || max_fault_order > static_cast<int>(kVariableCount)) {
    throw ConfigError("max_fault_order must lie in [1, 7], got " +
                      std::to_string(max_fault_order));
  }
  RuleBase rb;
  rb.max_fault_order = max_fault_order;
  rb.mode = mode;

  Rule all_zero;
  all_zero.premise.fill(Constraint::Z);
  all_zero.ok.set();
  rb.rules.push_back(all_zero);

  // Enumerate fault sets by increasing order, lexicographic within an order.
  for (int order = 1; order <= max_fault_order; ++order) {
    std::vector<bool> pick(kVariableCount, false);
    std::fill(pick.begin(), pick.begin() + order, true);
    do {
      Rule rule;
      std::array<int, kArrCount> touches{};
      for (std::size_t v = 0; v < kVariableCount; ++v) {
        if (!pick[v]) continue;
        rule.faulty.set(v);
        for (std::size_t j = 0; j < kArrCount; ++j) touches[j] += sig[v].test(j);
      }
      std::bitset<kArrCount> support;
      for (std::size_t j = 0; j < kArrCount; ++j) {
        rule.premise[j] = touches[j] == 0   ? Constraint::Z
                          : touches[j] == 1 ? Constraint::NonZ
                                            : Constraint::Any;
        support.set(j, touches[j] > 0);
      }
      rule.alarm = rule.faulty;
      if (mode == InferenceMode::Parsimonious) {
        rule.ok = ~rule.faulty;
      } else {
        for (std::size_t v = 0; v < kVariableCount; ++v) {
          if (!rule.faulty.test(v) && (sig[v] & support).none()) rule.ok.set(v);
        }
      }
      rb.rules.push_back(rule);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return rb;
}

std::vector<double> firing_strengths(const MembershipTable& m,
                                     const RuleBase& rb) {
  constexpr std::size_t kConstraintCount = 7;
  std::array<std::array<double, kConstraintCount>, kArrCount> table{};
  for (std::size_t j = 0; j < kArrCount; ++j) {
    for (std::size_t c = 0; c < kConstraintCount; ++c) {
      table[j][c] = constraint_degree(static_cast<Constraint>(c), m[j]);
    }
  }
  std::vector<double> out;
  out.reserve(rb.rules.size());
  for (const Rule& rule : rb.rules) {
    double s = 1.0;
    for (std::size_t j = 0; j < kArrCount; ++j) {
      s = std::min(s, table[j][static_cast<std::size_t>(rule.premise[j])]);
    }
    out.push_back(s);
  }
  return out;
}

Activations infer(const MembershipTable& m, const RuleBase& rb) {
  std::vector<double> strength = firing_strengths(m, rb);

  if (rb.mode == InferenceMode::Parsimonious) {
    constexpr std::size_t kRanks = (kVariableCount + 1) * (kArrCount + 1);
    auto rank = [](const Rule& r) { return r.order() * (kArrCount + 1) + r.compensated(); };
    std::array<double, kRanks> best_by_rank{};
    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
      if (rb.rules[i].order() == 0) continue;
      const std::size_t q = rank(rb.rules[i]);
      best_by_rank[q] = std::max(best_by_rank[q], strength[i]);
    }
    // inhibition[q] = strongest fault rule of rank below q
    std::array<double, kRanks> inhibition{};
    for (std::size_t q = 1; q < kRanks; ++q) {
      inhibition[q] = std::max(inhibition[q - 1], best_by_rank[q - 1]);
    }
    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
      if (rb.rules[i].order() == 0) continue;
      strength[i] = std::min(strength[i], 1.0 - inhibition[rank(rb.rules[i])]);
    }
  }

  Activations act{};
  for (std::size_t i = 0; i < rb.rules.size(); ++i) {
    const Rule& rule = rb.rules[i];
    for (std::size_t v = 0; v < kVariableCount; ++v) {
      if (rule.alarm.test(v)) act[v].alarm = std::max(act[v].alarm, strength[i]);
      if (rule.ok.test(v)) act[v].ok = std::max(act[v].ok, strength[i]);
    }
  }
  return act;
}

double defuzzify(Activation act, const OutputPartition& p, double fallback) {
  const double h_ok = std::clamp(act.ok, 0.0, 1.0);
  const double h_al = std::clamp(act.alarm, 0.0, 1.0);
  if (h_ok <= 0.0 && h_al <= 0.0) return fallback;
  const double left = p.b - p.a;
  const double right = p.d - p.c;
  const double ok_mass =
      ramp_mass(h_ok, left) + (p.c - p.b) * h_ok + ramp_mass(h_ok, right);
  const double al_mass = ramp_mass(h_al, left) + ramp_mass(h_al, right);
  return al_mass / (al_mass + ok_mass);
}

void DetectorConfig::validate() const {
  for (std::size_t i = 0; i < kArrCount; ++i) {
    try {
      inputs[i].validate();
    } catch (const ConfigError& e) {
      throw ConfigError(arr_name(i) + ": " + e.what());
    }
  }
  for (Variable v : kAllVariables) {
    try {
      outputs[index(v)].validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(variable_name(v)) + ": " + e.what());
    }
  }
  rulebase.validate();
  // A threshold of exactly 1 is accepted: degrees never exceed it, which
  // gives a detector that never flags.
  if (!(alarm_threshold > 0.0 && alarm_threshold <= 1.0)) {
    throw ConfigError("alarm_threshold must lie in (0, 1]");
  }
  if (debounce < 1) throw ConfigError("debounce must be >= 1");
}

DetectionStep detect(const ResidualVector& residuals, const DetectorConfig& cfg,
                     DetectorState& state) {
  MembershipTable table;
  for (std::size_t j = 0; j < kArrCount; ++j) {
    table[j] = fuzzify(residuals[j], cfg.inputs[j]);
  }
  const Activations act = infer(table, cfg.rulebase);

  DetectionStep out;
  for (std::size_t v = 0; v < kVariableCount; ++v) {
    const double deg = defuzzify(act[v], cfg.outputs[v], state.held[v]);
    state.held[v] = deg;
    state.consecutive[v] = deg > cfg.alarm_threshold ? state.consecutive[v] + 1 : 0;
    out.degrees[v] = deg;
    out.flags.set(v, state.consecutive[v] >= cfg.debounce);
  }
  return out;
}

RepairedConfig params_to_config(std::span<const double> x,
                                const DetectorConfig& base) {
  if (x.size() != kParameterCount) {
    throw ConfigError("parameter vector must hold 48 values, got " +
                      std::to_string(x.size()));
  }
  RepairedConfig out{base, false};
  for (std::size_t i = 0; i < kArrCount; ++i) {
    std::array<double, 4> t{x[4 * i], x[4 * i + 1], x[4 * i + 2], x[4 * i + 3]};
    const std::array<double, 4> original = t;
    std::sort(t.begin(), t.end());
    t[0] = std::max(t[0], kRepairGap);
    if (t[1] <= t[0]) t[1] = t[0] + kRepairGap;
    t[2] = std::max(t[2], t[1]);
    if (t[3] <= t[2]) t[3] = t[2] + kRepairGap;
    out.repaired = out.repaired || t != original;
    InputPartition& p = out.config.inputs[i];
    p.a1 = t[0];
    p.a2 = t[1];
    p.a3 = t[2];
    p.a4 = t[3];
  }
  for (std::size_t j = 0; j < kVariableCount; ++j) {
    const std::size_t o = kInputParameterCount + 4 * j;
    const std::array<double, 4> original{x[o], x[o + 1], x[o + 2], x[o + 3]};
    double a = -std::abs(original[0]), b = -std::abs(original[1]);
    double c = std::abs(original[2]), d = std::abs(original[3]);
    if (a > b) std::swap(a, b);
    if (a >= b) a = b - kRepairGap;
    if (c > d) std::swap(c, d);
    if (d <= c) d = c + kRepairGap;
    const std::array<double, 4> t{a, b, c, d};
    out.repaired = out.repaired || t != original;
    out.config.outputs[j] = OutputPartition{a, b, c, d};
  }
  out.config.validate();
  return out;
}

std::vector<double> config_to_params(const DetectorConfig& cfg) {
  std::vector<double> x;
  x.reserve(kParameterCount);
  for (const InputPartition& p : cfg.inputs) {
    x.insert(x.end(), {p.a1, p.a2, p.a3, p.a4});
  }
  for (const OutputPartition& p : cfg.outputs) {
    x.insert(x.end(), {p.a, p.b, p.c, p.d});
  }
  return x;
}

}  // namespace fdi
