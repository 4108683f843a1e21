#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <vector>

#include "fdi/plant.hpp"
#include "fdi/variables.hpp"

namespace fdi {

// Values of the five redundancy relations ARR1..ARR5, in flow units.
struct ResidualVector {
  double t{0.0};
  std::array<double, kArrCount> r{};

  double operator[](std::size_t i) const { return r[i]; }
  double& operator[](std::size_t i) { return r[i]; }
};

using ResidualTrace = std::vector<ResidualVector>;

// Backward difference of the last two samples. Throws InsufficientHistory
// when the window holds fewer than two samples.
double derivative_estimate(std::span<const double> window, double dt);

// Backward difference followed by an optional single-pole low-pass.
// tau == 0 disables the smoothing.
class DerivativeFilter {
 public:
  DerivativeFilter(double dt, double tau);

  // Returns the smoothed derivative; throws InsufficientHistory on the
  // first sample.
  double update(double x);
  // Records the first sample without producing a derivative.
  void prime(double x);
  bool primed() const { return has_prev_; }

 private:
  double dt_;
  double alpha_;
  bool has_prev_{false};
  bool has_output_{false};
  double prev_{0.0};
  double output_{0.0};
};

// ARRs with the effort derivatives supplied by the caller:
//   r1 = Msf1 - C1 dDe1 - De1/R1 - Df1
//   r2 = Df1  - C2 dDe2 - De2/R2 - Df2
//   r3 = Msf2 - Df2 - C3 dDe3 - De3/R3
//   r4 = (De3 - De2)/R23 - Df2
//   r5 = (De1 - De2)/R12 - Df1
ResidualVector evaluate_arrs(const MeasurementFrame& frame,
                             const std::array<double, 3>& effort_derivatives,
                             const PlantParams& params);

// Same relations with unsmoothed backward differences between two frames.
ResidualVector evaluate_arrs(const MeasurementFrame& frame,
                             const MeasurementFrame& prev,
                             const PlantParams& params, double dt);

struct ResidualOptions {
  // Derivative low-pass time constant in seconds; unset means 3 * dt and
  // zero disables smoothing.
  std::optional<double> smoothing_tau;
};

// Streaming evaluation over one trace. The first frame has no predecessor and
// is evaluated with zero effort derivatives (traces start at rest).
class ResidualGenerator {
 public:
  ResidualGenerator(const PlantParams& params, double dt,
                    ResidualOptions options = {});

  ResidualVector push(const MeasurementFrame& frame);

 private:
  PlantParams params_;
  std::array<DerivativeFilter, 3> filters_;
};

ResidualTrace residual_trace(const Trace& trace, const PlantParams& params,
                             double dt, ResidualOptions options = {});

// Rows are supervised variables, bit j set when the variable appears in ARR(j+1).
using SignatureMatrix = std::array<std::bitset<kArrCount>, kVariableCount>;

const SignatureMatrix& signature_matrix();

}  // namespace fdi
