#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fdi/errors.hpp"
#include "fdi/fuzzy.hpp"
#include "fdi/presets.hpp"

using namespace fdi;

namespace {

Memberships fz(double r, InputPartition p = {}) { return fuzzify(r, p); }

MembershipTable random_table(std::mt19937_64& rng) {
  // Realistic tables come from fuzzifying residuals, so use that.
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  MembershipTable m;
  for (auto& row : m) row = fz(u(rng));
  return m;
}

ResidualVector residuals(std::array<double, kArrCount> r) {
  ResidualVector v;
  v.r = r;
  return v;
}

DetectionStep detect_once(const std::array<double, kArrCount>& r, const DetectorConfig& cfg) {
  DetectorState state;
  return detect(residuals(r), cfg, state);
}

}  // namespace

TEST(Trapezoid, CoreShouldersAndOutside) {
  EXPECT_EQ(trapezoid(0.5, 0, 1, 2, 3), 0.5);
  EXPECT_EQ(trapezoid(1.5, 0, 1, 2, 3), 1.0);
  EXPECT_EQ(trapezoid(2.25, 0, 1, 2, 3), 0.75);
  EXPECT_EQ(trapezoid(-1.0, 0, 1, 2, 3), 0.0);
  EXPECT_EQ(trapezoid(5.0, 0, 1, 5, 5), 1.0);
}

TEST(Fuzzify, ZeroIsCoreOfZ) {
  const Memberships m = fz(0.0);
  EXPECT_EQ(m, (Memberships{0, 0, 1, 0, 0}));
}

TEST(Fuzzify, ShoulderExample) {
  const InputPartition p{1, 2, 3, 4, 10};
  const Memberships m = fz(1.5, p);
  EXPECT_DOUBLE_EQ(degree(m, Label::Z), 0.5);
  EXPECT_DOUBLE_EQ(degree(m, Label::P), 0.5);
  EXPECT_EQ(degree(m, Label::N), 0.0);
  EXPECT_EQ(degree(m, Label::NB), 0.0);
  EXPECT_EQ(degree(m, Label::PB), 0.0);
}

TEST(Fuzzify, SaturatesBeyondBeta) {
  const InputPartition p{1, 2, 3, 4, 10};
  EXPECT_EQ(degree(fz(1e6, p), Label::PB), 1.0);
  EXPECT_EQ(degree(fz(-1e6, p), Label::NB), 1.0);
}

TEST(Fuzzify, NegationMirrorsLabels) {
  const InputPartition p{0.2, 0.7, 1.1, 2.3, 25};
  for (double r : {0.0, 0.1, 0.45, 0.9, 1.5, 2.0, 3.0, 30.0}) {
    const Memberships a = fz(r, p);
    Memberships b = fz(-r, p);
    std::reverse(b.begin(), b.end());
    EXPECT_EQ(a, b) << r;
  }
}

TEST(Fuzzify, PartitionOfUnityOnShoulders) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  const InputPartition p{0.3, 0.8, 1.4, 2.9, 25};
  for (int i = 0; i < 2000; ++i) {
    const Memberships m = fz(u(rng), p);
    int nonzero = 0;
    double sum = 0.0;
    for (double x : m) {
      nonzero += x > 0.0;
      sum += x;
    }
    EXPECT_LE(nonzero, 2);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Partitions, Validation) {
  EXPECT_THROW((InputPartition{0.5, 0.4, 1, 2, 25}.validate()), ConfigError);
  EXPECT_THROW((InputPartition{0.0, 0.4, 1, 2, 25}.validate()), ConfigError);
  EXPECT_THROW((InputPartition{0.1, 0.4, 1, 30, 25}.validate()), ConfigError);
  EXPECT_NO_THROW((InputPartition{0.1, 0.4, 0.4, 2, 25}.validate()));
  EXPECT_THROW((OutputPartition{-1, 0.1, 0.3, 1}.validate()), ConfigError);
  EXPECT_THROW((OutputPartition{-1, -0.3, 1, 1}.validate()), ConfigError);
  EXPECT_NO_THROW((OutputPartition{-1, 0, 0, 1}.validate()));
}

TEST(ConstraintDegree, Readings) {
  const Memberships m{0.0, 0.3, 0.7, 0.0, 0.0};
  EXPECT_EQ(constraint_degree(Constraint::Z, m), 0.7);
  EXPECT_EQ(constraint_degree(Constraint::NonZ, m), 0.3);
  EXPECT_EQ(constraint_degree(Constraint::Any, m), 1.0);
  EXPECT_EQ(constraint_degree(Constraint::N, m), 0.3);
}

TEST(RuleBase, OrderOneHasEightRules) {
  const RuleBase rb = build_rulebase(signature_matrix(), 1);
  EXPECT_EQ(rb.rules.size(), 8u);
  EXPECT_NO_THROW(rb.validate());
}

TEST(RuleBase, DefaultSizeCountsAllSetsUpToThree) {
  const RuleBase rb = build_rulebase(signature_matrix(), 3);
  EXPECT_EQ(rb.rules.size(), 1u + 7u + 21u + 35u);
  EXPECT_EQ(build_rulebase(signature_matrix(), 7).rules.size(), 128u);
}

TEST(RuleBase, InvalidOrder) {
  EXPECT_THROW(build_rulebase(signature_matrix(), 0), ConfigError);
  EXPECT_THROW(build_rulebase(signature_matrix(), 8), ConfigError);
}

TEST(RuleBase, SingleFaultRuleForDe1) {
  const RuleBase rb = build_rulebase(signature_matrix(), 1, InferenceMode::Signature);
  const auto it = std::find_if(rb.rules.begin(), rb.rules.end(), [](const Rule& r) {
    return r.order() == 1 && r.faulty.test(index(Variable::De1));
  });
  ASSERT_NE(it, rb.rules.end());
  using C = Constraint;
  EXPECT_EQ(it->premise, (std::array<C, 5>{C::NonZ, C::Z, C::Z, C::Z, C::NonZ}));
  EXPECT_EQ(it->alarm, it->faulty);
  // Signature mode: OK only for variables whose signature avoids ARR1, ARR5.
  VariableSet ok;
  ok.set(index(Variable::Msf2));
  ok.set(index(Variable::De3));
  ok.set(index(Variable::Df2));
  EXPECT_EQ(it->ok, ok);
}

TEST(RuleBase, CompensationPairPremise) {
  const RuleBase rb = build_rulebase(signature_matrix(), 2);
  VariableSet pair;
  pair.set(index(Variable::De2));
  pair.set(index(Variable::Df2));
  const auto it = std::find_if(rb.rules.begin(), rb.rules.end(),
                               [&](const Rule& r) { return r.faulty == pair; });
  ASSERT_NE(it, rb.rules.end());
  using C = Constraint;
  EXPECT_EQ(it->premise, (std::array<C, 5>{C::Z, C::Any, C::NonZ, C::Any, C::NonZ}));
  EXPECT_EQ(it->compensated(), 2u);
}

TEST(Infer, AllZeroResidualsGiveOkEverywhere) {
  MembershipTable m;
  m.fill(fz(0.0));
  for (InferenceMode mode : {InferenceMode::Signature, InferenceMode::Parsimonious}) {
    const Activations act = infer(m, build_rulebase(signature_matrix(), 3, mode));
    for (const Activation& a : act) {
      EXPECT_EQ(a.ok, 1.0);
      EXPECT_EQ(a.alarm, 0.0);
    }
  }
}

TEST(Infer, Arr1AlonePointsAtMsf1) {
  MembershipTable m;
  m.fill(fz(0.0));
  m[0] = {0, 0, 0, 1, 0};
  for (InferenceMode mode : {InferenceMode::Signature, InferenceMode::Parsimonious}) {
    const Activations act = infer(m, build_rulebase(signature_matrix(), 3, mode));
    EXPECT_EQ(act[index(Variable::Msf1)].alarm, 1.0);
    EXPECT_EQ(act[index(Variable::De1)].alarm, 0.0);
    EXPECT_EQ(act[index(Variable::Df1)].alarm, 0.0);
  }
}

// Independent restatement of the rule construction and MIN-MAX evaluation.
TEST(Infer, MatchesBruteForceEnumeration) {
  const SignatureMatrix& sig = signature_matrix();
  std::mt19937_64 rng(17);
  for (int order = 1; order <= 2; ++order) {
    const RuleBase rb = build_rulebase(sig, order, InferenceMode::Signature);
    for (int trial = 0; trial < 300; ++trial) {
      const MembershipTable m = random_table(rng);
      Activations expected{};
      for (std::size_t v = 0; v < kVariableCount; ++v) {
        expected[v].ok = 1.0;  // all-Z rule, refined below
        double allz = 1.0;
        for (std::size_t j = 0; j < kArrCount; ++j) allz = std::min(allz, degree(m[j], Label::Z));
        expected[v].ok = allz;
      }
      for (unsigned mask = 1; mask < (1u << kVariableCount); ++mask) {
        const VariableSet f(mask);
        if (static_cast<int>(f.count()) > order) continue;
        double s = 1.0;
        std::bitset<kArrCount> support;
        for (std::size_t j = 0; j < kArrCount; ++j) {
          int touches = 0;
          for (std::size_t v = 0; v < kVariableCount; ++v) touches += f.test(v) && sig[v].test(j);
          support.set(j, touches > 0);
          const Memberships& mj = m[j];
          if (touches == 0) s = std::min(s, degree(mj, Label::Z));
          if (touches == 1) {
            s = std::min(s, std::max({mj[0], mj[1], mj[3], mj[4]}));
          }
        }
        for (std::size_t v = 0; v < kVariableCount; ++v) {
          if (f.test(v)) expected[v].alarm = std::max(expected[v].alarm, s);
          if (!f.test(v) && (sig[v] & support).none()) {
            expected[v].ok = std::max(expected[v].ok, s);
          }
        }
      }
      const Activations got = infer(m, rb);
      for (std::size_t v = 0; v < kVariableCount; ++v) {
        EXPECT_DOUBLE_EQ(got[v].alarm, expected[v].alarm);
        EXPECT_DOUBLE_EQ(got[v].ok, expected[v].ok);
      }
    }
  }
}

TEST(Infer, ParsimoniousMatchesRankedAttenuation) {
  std::mt19937_64 rng(23);
  const RuleBase rb = build_rulebase(signature_matrix(), 2);
  for (int trial = 0; trial < 300; ++trial) {
    const MembershipTable m = random_table(rng);
    const std::vector<double> raw = firing_strengths(m, rb);
    Activations expected{};
    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
      const Rule& r = rb.rules[i];
      double s = raw[i];
      if (r.order() > 0) {
        for (std::size_t k = 0; k < rb.rules.size(); ++k) {
          const Rule& o = rb.rules[k];
          const bool ranked_before =
              o.order() > 0 && (o.order() < r.order() ||
                                (o.order() == r.order() && o.compensated() < r.compensated()));
          if (ranked_before) s = std::min(s, 1.0 - raw[k]);
        }
      }
      for (std::size_t v = 0; v < kVariableCount; ++v) {
        if (r.faulty.test(v)) expected[v].alarm = std::max(expected[v].alarm, s);
        if (!r.faulty.test(v)) expected[v].ok = std::max(expected[v].ok, s);
      }
    }
    const Activations got = infer(m, rb);
    for (std::size_t v = 0; v < kVariableCount; ++v) {
      EXPECT_DOUBLE_EQ(got[v].alarm, expected[v].alarm);
      EXPECT_DOUBLE_EQ(got[v].ok, expected[v].ok);
    }
  }
}

TEST(Infer, SignatureModeIsMonotoneInPremiseDegrees) {
  // Raising the Z degree of an all-Z table can only raise OK activations.
  const RuleBase rb = build_rulebase(signature_matrix(), 3, InferenceMode::Signature);
  MembershipTable lo, hi;
  lo.fill({0.0, 0.4, 0.6, 0.0, 0.0});
  hi.fill({0.0, 0.2, 0.8, 0.0, 0.0});
  const Activations a = infer(lo, rb), b = infer(hi, rb);
  for (std::size_t v = 0; v < kVariableCount; ++v) EXPECT_LE(a[v].ok, b[v].ok);
}

TEST(Defuzzify, PureActivations) {
  const OutputPartition p;
  EXPECT_EQ(defuzzify({1.0, 0.0}, p), 0.0);
  EXPECT_EQ(defuzzify({0.0, 1.0}, p), 1.0);
}

TEST(Defuzzify, SymmetricTieWithPointCoreIsHalf) {
  const OutputPartition p{-1.0, 0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(defuzzify({0.5, 0.5}, p), 0.5);
}

TEST(Defuzzify, PlateauTiltsTiesTowardOk) {
  const OutputPartition p{-1.0, -0.3, 0.3, 1.0};
  EXPECT_LT(defuzzify({0.5, 0.5}, p), 0.5);
}

TEST(Defuzzify, NoActivationReturnsFallback) {
  EXPECT_EQ(defuzzify({0.0, 0.0}, OutputPartition{}), 0.0);
  EXPECT_EQ(defuzzify({0.0, 0.0}, OutputPartition{}, 0.7), 0.7);
}

TEST(Defuzzify, MonotoneInActivations) {
  const OutputPartition p{-0.754, -0.304, 0.304, 0.6746};
  for (double ok = 0.0; ok <= 1.0; ok += 0.1) {
    double prev = -1.0;
    for (double al = 0.05; al <= 1.0; al += 0.05) {
      const double d = defuzzify({ok, al}, p);
      EXPECT_GE(d, prev);
      prev = d;
    }
  }
  for (double al = 0.05; al <= 1.0; al += 0.1) {
    double prev = 2.0;
    for (double ok = 0.0; ok <= 1.0; ok += 0.05) {
      const double d = defuzzify({ok, al}, p);
      EXPECT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(Detect, ZeroResidualsNeverFlag) {
  const DetectorConfig cfg = presets::pso_reference();
  DetectorState state;
  for (int k = 0; k < 50; ++k) {
    const DetectionStep s = detect(residuals({}), cfg, state);
    EXPECT_TRUE(s.flags.none());
    for (double d : s.degrees) EXPECT_EQ(d, 0.0);
  }
}

TEST(Detect, LargeDe1FaultFlagsAfterDebounce) {
  DetectorConfig cfg = presets::pso_reference();
  cfg.debounce = 4;
  // Saturated De1 pattern: ARR1 and ARR5 far beyond a4.
  const ResidualVector r = residuals({-20.0, 0.0, 0.0, 0.0, 20.0});
  DetectorState state;
  for (int k = 1; k <= 6; ++k) {
    const DetectionStep s = detect(r, cfg, state);
    EXPECT_DOUBLE_EQ(s.degrees[index(Variable::De1)], 1.0);
    EXPECT_EQ(s.flags.test(index(Variable::De1)), k >= 4) << k;
    EXPECT_EQ(s.flags.count(), k >= 4 ? 1u : 0u);
  }
}

TEST(Detect, SignSymmetryOfDegrees) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const DetectorConfig& cfg : {presets::pso_reference(), presets::ga_reference()}) {
    for (int i = 0; i < 200; ++i) {
      std::array<double, kArrCount> r, neg;
      for (std::size_t j = 0; j < kArrCount; ++j) {
        r[j] = u(rng);
        neg[j] = -r[j];
      }
      EXPECT_EQ(detect_once(r, cfg).degrees, detect_once(neg, cfg).degrees);
    }
  }
}

TEST(Detect, ThresholdOneNeverFlags) {
  DetectorConfig cfg = presets::pso_reference();
  cfg.alarm_threshold = 1.0;
  DetectorState state;
  for (int k = 0; k < 10; ++k) {
    EXPECT_TRUE(detect(residuals({20, 0, 0, 0, 20}), cfg, state).flags.none());
  }
}

TEST(Detect, StrictThreshold) {
  DetectorConfig cfg = presets::pso_reference();
  cfg.debounce = 1;
  const ResidualVector r = residuals({20.0, 0, 0, 0, 0});
  DetectorState state;
  const double d = detect(r, cfg, state).degrees[index(Variable::Msf1)];
  cfg.alarm_threshold = d;
  state = {};
  EXPECT_FALSE(detect(r, cfg, state).flags.test(index(Variable::Msf1)));
}

TEST(Detect, CompensatedPairStillAlarms) {
  // De2 fault m with Df2 = -m/R2 cancels ARR2: r = (0, 0, m/2, -m/2, -m).
  const DetectorConfig cfg = presets::pso_reference();
  const DetectionStep s = detect_once({0.0, 0.0, 3.0, -3.0, -6.0}, cfg);
  const DetectionStep base = detect_once({}, cfg);
  EXPECT_GT(s.degrees[index(Variable::De2)], base.degrees[index(Variable::De2)]);
  EXPECT_GT(s.degrees[index(Variable::Df2)], base.degrees[index(Variable::Df2)]);
  EXPECT_GT(s.degrees[index(Variable::De2)], 0.5);
  EXPECT_GT(s.degrees[index(Variable::Df2)], 0.5);
}

TEST(DetectorConfig, Validation) {
  DetectorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.alarm_threshold = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.debounce = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Genome, TableTwoRoundTripsWithoutRepair) {
  const std::vector<double>& x = presets::pso_reference_params();
  const RepairedConfig rc = params_to_config(x);
  EXPECT_FALSE(rc.repaired);
  EXPECT_EQ(config_to_params(rc.config), x);
  EXPECT_DOUBLE_EQ(rc.config.inputs[0].a1, 0.146);
  EXPECT_DOUBLE_EQ(rc.config.inputs[0].a2, 0.973);
  EXPECT_DOUBLE_EQ(rc.config.inputs[0].a3, 1.57);
  EXPECT_DOUBLE_EQ(rc.config.inputs[0].a4, 1.73);
  EXPECT_FALSE(params_to_config(presets::ga_reference_params()).repaired);
}

TEST(Genome, RoundTripForRandomValidPoints) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x;
    for (std::size_t k = 0; k < kArrCount; ++k) {
      const double a1 = u(rng), a2 = a1 + u(rng), a3 = a2 + u(rng), a4 = a3 + u(rng);
      x.insert(x.end(), {a1, a2, a3, a4});
    }
    for (std::size_t k = 0; k < kVariableCount; ++k) {
      const double b = -u(rng) / 2, a = b - u(rng), c = u(rng) / 2, d = c + u(rng);
      x.insert(x.end(), {a, b, c, d});
    }
    const RepairedConfig rc = params_to_config(x);
    EXPECT_FALSE(rc.repaired);
    EXPECT_EQ(config_to_params(rc.config), x);
  }
}

TEST(Genome, MisorderedInputsAreRepaired) {
  std::vector<double> x = presets::pso_reference_params();
  std::swap(x[0], x[1]);
  const RepairedConfig rc = params_to_config(x);
  EXPECT_TRUE(rc.repaired);
  EXPECT_DOUBLE_EQ(rc.config.inputs[0].a1, 0.146);
  EXPECT_DOUBLE_EQ(rc.config.inputs[0].a2, 0.973);
}

TEST(Genome, OutputSignsAreProjected) {
  std::vector<double> x = presets::pso_reference_params();
  x[kInputParameterCount + 0] = 0.754;  // a of Msf1 with the wrong sign
  const RepairedConfig rc = params_to_config(x);
  EXPECT_TRUE(rc.repaired);
  EXPECT_DOUBLE_EQ(rc.config.outputs[0].a, -0.754);
  EXPECT_NO_THROW(rc.config.validate());
}

TEST(Genome, DegenerateBoundsStillYieldValidConfig) {
  std::vector<double> x(kParameterCount, 0.0);
  const RepairedConfig rc = params_to_config(x);
  EXPECT_TRUE(rc.repaired);
  EXPECT_NO_THROW(rc.config.validate());
}

TEST(Genome, WrongLength) {
  const std::vector<double> x(47, 0.5);
  EXPECT_THROW(params_to_config(x), ConfigError);
}
