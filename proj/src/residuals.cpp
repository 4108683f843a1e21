#include "fdi/residuals.hpp"

#include "fdi/errors.hpp"

namespace fdi {

double derivative_estimate(std::span<const double> window, double dt) {
  if (window.size() < 2) {
    throw InsufficientHistory("derivative needs at least two samples");
  }
  const std::size_t n = window.size();
  return (window[n - 1] - window[n - 2]) / dt;
}

DerivativeFilter::DerivativeFilter(double dt, double tau)
    : dt_(dt), alpha_(tau > 0.0 ? dt / (tau + dt) : 1.0) {}

void DerivativeFilter::prime(double x) {
  prev_ = x;
  has_prev_ = true;
}

double DerivativeFilter::update(double x) {
  if (!has_prev_) {
    prime(x);
    throw InsufficientHistory("derivative undefined at the first sample");
  }
  const double raw = (x - prev_) / dt_;
  prev_ = x;
  output_ = has_output_ ? output_ + alpha_ * (raw - output_) : raw;
  has_output_ = true;
  return output_;
}

ResidualVector evaluate_arrs(const MeasurementFrame& f,
                             const std::array<double, 3>& dDe,
                             const PlantParams& p) {
  using V = Variable;
  ResidualVector out;
  out.t = f.t;
  out[0] = f[V::Msf1] - p.C1 * dDe[0] - f[V::De1] / p.R1 - f[V::Df1];
  out[1] = f[V::Df1] - p.C2 * dDe[1] - f[V::De2] / p.R2 - f[V::Df2];
  out[2] = f[V::Msf2] - f[V::Df2] - p.C3 * dDe[2] - f[V::De3] / p.R3;
  out[3] = (f[V::De3] - f[V::De2]) / p.R23 - f[V::Df2];
  out[4] = (f[V::De1] - f[V::De2]) / p.R12 - f[V::Df1];
  return out;
}

ResidualVector evaluate_arrs(const MeasurementFrame& frame,
                             const MeasurementFrame& prev,
                             const PlantParams& params, double dt) {
  using V = Variable;
  const std::array<double, 2> d1{prev[V::De1], frame[V::De1]};
  const std::array<double, 2> d2{prev[V::De2], frame[V::De2]};
  const std::array<double, 2> d3{prev[V::De3], frame[V::De3]};
  return evaluate_arrs(frame,
                       {derivative_estimate(d1, dt), derivative_estimate(d2, dt),
                        derivative_estimate(d3, dt)},
                       params);
}

namespace {
double resolve_tau(const ResidualOptions& o, double dt) {
  return o.smoothing_tau.value_or(3.0 * dt);
}
}  // namespace

ResidualGenerator::ResidualGenerator(const PlantParams& params, double dt,
                                     ResidualOptions options)
    : params_(params),
      filters_{DerivativeFilter(dt, resolve_tau(options, dt)),
               DerivativeFilter(dt, resolve_tau(options, dt)),
               DerivativeFilter(dt, resolve_tau(options, dt))} {}

ResidualVector ResidualGenerator::push(const MeasurementFrame& frame) {
  constexpr std::array<Variable, 3> efforts{Variable::De1, Variable::De2,
                                            Variable::De3};
  std::array<double, 3> d{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (filters_[i].primed()) {
      d[i] = filters_[i].update(frame[efforts[i]]);
    } else {
      filters_[i].prime(frame[efforts[i]]);
    }
  }
  return evaluate_arrs(frame, d, params_);
}

ResidualTrace residual_trace(const Trace& trace, const PlantParams& params,
                             double dt, ResidualOptions options) {
  ResidualGenerator gen(params, dt, options);
  ResidualTrace out;
  out.reserve(trace.size());
  for (const MeasurementFrame& f : trace) out.push_back(gen.push(f));
  return out;
}

const SignatureMatrix& signature_matrix() {
  static const SignatureMatrix kMatrix = [] {
    SignatureMatrix m{};
    auto set = [&m](Variable v, std::initializer_list<int> arrs) {
      for (int a : arrs) m[index(v)].set(static_cast<std::size_t>(a - 1));
    };
    set(Variable::Msf1, {1});
    set(Variable::Msf2, {3});
    set(Variable::De1, {1, 5});
    set(Variable::De2, {2, 4, 5});
    set(Variable::De3, {3, 4});
    set(Variable::Df1, {1, 2, 5});
    set(Variable::Df2, {2, 3, 4});
    return m;
  }();
  return kMatrix;
}

}  // namespace fdi
