#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fdi/residuals.hpp"
#include "fdi/variables.hpp"

namespace fdi {

// Linguistic terms for a residual: negative big .. positive big.
enum class Label : std::uint8_t { NB, N, Z, P, PB };
inline constexpr std::size_t kLabelCount = 5;

using Memberships = std::array<double, kLabelCount>;
using MembershipTable = std::array<Memberships, kArrCount>;

inline double degree(const Memberships& m, Label l) {
  return m[static_cast<std::size_t>(l)];
}

inline constexpr double kDefaultBeta = 25.0;

// Symmetric five-set partition of one residual axis. The sets are
//   Z  = (-a2, -a1,  a1,  a2)
//   P  = ( a1,  a2,  a3,  a4)    N  mirrored
//   PB = ( a3,  a4, beta, beta)  NB mirrored
// with 0 < a1 < a2 <= a3 < a4 <= beta.
struct InputPartition {
  double a1{0.1}, a2{0.5}, a3{1.0}, a4{2.0};
  double beta{kDefaultBeta};

  void validate() const;
  bool operator==(const InputPartition&) const = default;
};

// OK/AL partition of one output. OK is the trapezoid (a, b, c, d) with its
// plateau on the fault-free band [b, c]; AL is the complement on the two
// flanks [a, b] and [c, d]. Requires a < b <= 0 <= c < d.
struct OutputPartition {
  double a{-1.0}, b{-0.3}, c{0.3}, d{1.0};

  void validate() const;
  bool operator==(const OutputPartition&) const = default;
};

// Trapezoid with feet a, d and plateau [b, c]. Degenerate shoulders
// (a == b or c == d) are vertical edges.
double trapezoid(double x, double a, double b, double c, double d);

// Degrees of (NB, N, Z, P, PB). Values beyond +/-beta saturate to PB/NB.
Memberships fuzzify(double r, const InputPartition& p);

// Premise constraint on one ARR.
enum class Constraint : std::uint8_t { NB, N, Z, P, PB, NonZ, Any };

// Z reads mu_Z, NonZ reads max(NB, N, P, PB), Any reads 1.
double constraint_degree(Constraint c, const Memberships& m);

struct Rule {
  std::array<Constraint, kArrCount> premise{};
  VariableSet faulty;  // the hypothesised fault set F (empty for all-Z)
  VariableSet alarm;   // variables concluded AL
  VariableSet ok;      // variables concluded OK

  std::size_t order() const { return faulty.count(); }
  // Number of ARRs left unconstrained because fault effects may cancel there.
  std::size_t compensated() const;
};

// How OK conclusions are attached and how competing explanations interact.
//
// Signature: a rule concludes OK only for variables whose whole signature it
// pins to Z; firing strengths combine by plain MIN-MAX.
//
// Parsimonious: every rule concludes OK for the variables outside its fault
// set, and each fault rule is attenuated by the complement of the strongest
// fault rule ranked before it. Rules rank by order, then by compensated()
// count, so the smallest fault set wins and, at equal size, an explanation
// that needs no cancellation beats one that does.
enum class InferenceMode { Signature, Parsimonious };

struct RuleBase {
  std::vector<Rule> rules;
  int max_fault_order{3};
  InferenceMode mode{InferenceMode::Parsimonious};

  void validate() const;
};

// One rule per non-empty fault set F with |F| <= max_fault_order:
//   ARRs outside supp(F) must be Z,
//   ARRs touched by exactly one member of F must be NonZ,
//   ARRs touched by two or more members are unconstrained (compensation),
// plus an all-Z rule concluding OK for every variable.
RuleBase build_rulebase(const SignatureMatrix& sig, int max_fault_order,
                        InferenceMode mode = InferenceMode::Parsimonious);

struct Activation {
  double ok{0.0};
  double alarm{0.0};
};
using Activations = std::array<Activation, kVariableCount>;

// Raw MIN firing strength of every rule, in rule order.
std::vector<double> firing_strengths(const MembershipTable& m,
                                     const RuleBase& rb);

Activations infer(const MembershipTable& m, const RuleBase& rb);

// Alarm degree = AL mass / (AL mass + OK mass), masses being the areas of
// the clipped memberships. Returns `fallback` when neither class fires.
double defuzzify(Activation act, const OutputPartition& p,
                 double fallback = 0.0);

struct DetectorConfig {
  std::array<InputPartition, kArrCount> inputs{};
  std::array<OutputPartition, kVariableCount> outputs{};
  RuleBase rulebase = build_rulebase(signature_matrix(), 3);
  double alarm_threshold{0.5};
  int debounce{3};

  void validate() const;
};

struct DetectorState {
  std::array<int, kVariableCount> consecutive{};
  std::array<double, kVariableCount> held{};
};

struct DetectionStep {
  std::array<double, kVariableCount> degrees{};
  VariableSet flags;
};

// One sample through fuzzification, inference and defuzzification. A flag is
// raised once a degree has exceeded the threshold for `debounce`
// consecutive samples.
DetectionStep detect(const ResidualVector& residuals, const DetectorConfig& cfg,
                     DetectorState& state);

// Genome layout: a11..a14, a21..a54 (20 input bounds), then a1, b1, c1, d1
// .. a7, b7, c7, d7 (28 output bounds).
inline constexpr std::size_t kParameterCount = 48;
inline constexpr std::size_t kInputParameterCount = 20;

struct RepairedConfig {
  DetectorConfig config;
  bool repaired{false};
};

// Builds a config from a genome, keeping rule base, beta, threshold and
// debounce from `base`. Out-of-order tuples are repaired and flagged.
// Throws ConfigError when x.size() != 48.
RepairedConfig params_to_config(std::span<const double> x,
                                const DetectorConfig& base = {});

std::vector<double> config_to_params(const DetectorConfig& cfg);

}  // namespace fdi
