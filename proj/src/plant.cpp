#include "fdi/plant.hpp"

#include <algorithm>
#include <cmath>

#include "fdi/errors.hpp"

namespace fdi {

namespace {

constexpr double kTimeEps = 1e-9;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("plant parameter ") + name +
                      " must be strictly positive");
  }
}

struct Derivatives {
  double d1, d2, d3;
};

Derivatives derivatives(const PlantState& s, Inputs u, const PlantParams& p,
                        PlantMode mode) {
  const CouplingFlows q = coupling_flows(s, p, mode);
  return {(u.Msf1 - s.De1 / p.R1 - q.Df1) / p.C1,
          (q.Df1 - s.De2 / p.R2 - q.Df2) / p.C2,
          (u.Msf2 - q.Df2 - s.De3 / p.R3) / p.C3};
}

PlantState advance(const PlantState& s, const Derivatives& d, double h) {
  return {s.De1 + h * d.d1, s.De2 + h * d.d2, s.De3 + h * d.d3, s.t};
}

}  // namespace

void PlantParams::validate() const {
  require_positive(C1, "C1");
  require_positive(C2, "C2");
  require_positive(C3, "C3");
  require_positive(R1, "R1");
  require_positive(R2, "R2");
  require_positive(R3, "R3");
  require_positive(R12, "R12");
  require_positive(R23, "R23");
  require_positive(S_conn, "S_conn");
  require_positive(g, "g");
  require_positive(rho, "rho");
  if (!(az > 0.0 && az <= 1.0)) {
    throw ConfigError("plant parameter az must lie in (0, 1]");
  }
}

double orifice_flow(double pi, double pj, const PlantParams& p) {
  const double dh = (pi - pj) / (p.rho * p.g);
  if (dh == 0.0) return 0.0;
  const double magnitude = p.az * p.S_conn * std::sqrt(2.0 * p.g * std::abs(dh));
  return dh > 0.0 ? magnitude : -magnitude;
}

CouplingFlows coupling_flows(const PlantState& s, const PlantParams& p,
                             PlantMode mode) {
  if (mode == PlantMode::Nonlinear) {
    return {orifice_flow(s.De1, s.De2, p), orifice_flow(s.De3, s.De2, p)};
  }
  return {(s.De1 - s.De2) / p.R12, (s.De3 - s.De2) / p.R23};
}

PlantState step(const PlantState& state, Inputs inputs, const PlantParams& p,
                double dt, PlantMode mode, Integrator integrator) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  PlantState next;
  if (integrator == Integrator::Euler) {
    next = advance(state, derivatives(state, inputs, p, mode), dt);
  } else {
    const Derivatives k1 = derivatives(state, inputs, p, mode);
    const Derivatives k2 =
        derivatives(advance(state, k1, dt / 2), inputs, p, mode);
    const Derivatives k3 =
        derivatives(advance(state, k2, dt / 2), inputs, p, mode);
    const Derivatives k4 = derivatives(advance(state, k3, dt), inputs, p, mode);
    const Derivatives blend{
        (k1.d1 + 2 * k2.d1 + 2 * k3.d1 + k4.d1) / 6.0,
        (k1.d2 + 2 * k2.d2 + 2 * k3.d2 + k4.d2) / 6.0,
        (k1.d3 + 2 * k2.d3 + 2 * k3.d3 + k4.d3) / 6.0};
    next = advance(state, blend, dt);
  }
  next.t = state.t + dt;
  if (!std::isfinite(next.De1)) throw SimulationDiverged("De1", next.t);
  if (!std::isfinite(next.De2)) throw SimulationDiverged("De2", next.t);
  if (!std::isfinite(next.De3)) throw SimulationDiverged("De3", next.t);
  return next;
}

PlantState equilibrium(Inputs u, const PlantParams& p) {
  // Steady-state balance of the three tanks, solved by Cramer's rule.
  const double g12 = 1.0 / p.R12, g23 = 1.0 / p.R23;
  const double m[3][3] = {{1.0 / p.R1 + g12, -g12, 0.0},
                          {g12, -(g12 + 1.0 / p.R2 - g23), -g23},
                          {0.0, -g23, g23 + 1.0 / p.R3}};
  const double b[3] = {u.Msf1, 0.0, u.Msf2};
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double det = det3(m);
  if (det == 0.0) throw ConfigError("equilibrium: singular plant parameters");
  double x[3];
  for (int col = 0; col < 3; ++col) {
    double mc[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) mc[r][c] = (c == col) ? b[r] : m[r][c];
    }
    x[col] = det3(mc) / det;
  }
  return {x[0], x[1], x[2], 0.0};
}

MeasurementFrame true_frame(const PlantState& s, Inputs u, const PlantParams& p,
                            PlantMode mode) {
  const CouplingFlows q = coupling_flows(s, p, mode);
  MeasurementFrame f;
  f.t = s.t;
  f[Variable::Msf1] = u.Msf1;
  f[Variable::Msf2] = u.Msf2;
  f[Variable::De1] = s.De1;
  f[Variable::De2] = s.De2;
  f[Variable::De3] = s.De3;
  f[Variable::Df1] = q.Df1;
  f[Variable::Df2] = q.Df2;
  return f;
}

double FaultEvent::offset_at(double t) const {
  const double elapsed = t - start;
  if (elapsed < -kTimeEps) return 0.0;
  if (profile == FaultProfile::Step) return magnitude;
  const double grown = slope * std::max(elapsed, 0.0);
  return magnitude >= 0.0 ? std::min(grown, magnitude)
                          : std::max(-grown, magnitude);
}

void FaultScenario::validate() const {
  if (!(dt > 0.0)) throw ConfigError("scenario '" + id + "': dt must be > 0");
  if (!(duration >= dt)) {
    throw ConfigError("scenario '" + id + "': duration must be >= dt");
  }
  if (!(noise_std_R >= 0.0) || !(noise_std_C >= 0.0)) {
    throw ConfigError("scenario '" + id + "': noise levels must be >= 0");
  }
  if (events.size() > kVariableCount) {
    throw ConfigError("scenario '" + id + "': at most 7 fault events");
  }
  for (const FaultEvent& e : events) {
    if (!(e.start >= 0.0 && e.start <= duration)) {
      throw ConfigError("scenario '" + id + "': event start outside [0, duration]");
    }
    if (!std::isfinite(e.magnitude)) {
      throw ConfigError("scenario '" + id + "': event magnitude must be finite");
    }
    if (e.profile == FaultProfile::Ramp && !(e.slope > 0.0)) {
      throw ConfigError("scenario '" + id + "': ramp slope must be > 0");
    }
  }
}

std::size_t FaultScenario::frame_count() const {
  return static_cast<std::size_t>(std::ceil(duration / dt - kTimeEps)) + 1;
}

VariableSet FaultScenario::injected() const {
  VariableSet s;
  for (const FaultEvent& e : events) s.set(index(e.target));
  return s;
}

MeasurementFrame measure(const MeasurementFrame& truth,
                         std::span<const FaultEvent> events, double t) {
  MeasurementFrame out = truth;
  out.t = t;
  for (const FaultEvent& e : events) out[e.target] += e.offset_at(t);
  return out;
}

PlantParams perturb_params(const PlantParams& p, double noise_std_R,
                           double noise_std_C, std::mt19937_64& rng) {
  PlantParams out = p;
  auto jitter = [&rng](double nominal, double sigma) {
    if (sigma == 0.0) return nominal;
    std::normal_distribution<double> n(0.0, sigma);
    return std::max(nominal * (1.0 + n(rng)), 0.01 * nominal);
  };
  out.R1 = jitter(p.R1, noise_std_R);
  out.R2 = jitter(p.R2, noise_std_R);
  out.R3 = jitter(p.R3, noise_std_R);
  out.R12 = jitter(p.R12, noise_std_R);
  out.R23 = jitter(p.R23, noise_std_R);
  out.C1 = jitter(p.C1, noise_std_C);
  out.C2 = jitter(p.C2, noise_std_C);
  out.C3 = jitter(p.C3, noise_std_C);
  return out;
}

Inputs InputSchedule::at(double t) const {
  Inputs current{};
  for (const auto& [from, u] : breakpoints) {
    if (t + kTimeEps >= from) current = u;
  }
  return current;
}

InputSchedule InputSchedule::constant(Inputs inputs) {
  return InputSchedule{{{0.0, inputs}}};
}

Trace run(const FaultScenario& scenario, const PlantParams& params,
          const InputSchedule& inputs, std::optional<PlantState> initial) {
  scenario.validate();
  params.validate();
  const bool noisy = scenario.noise_std_R > 0.0 || scenario.noise_std_C > 0.0;
  std::mt19937_64 rng(scenario.seed);

  PlantState state = initial.value_or(equilibrium(inputs.at(0.0), params));
  state.t = 0.0;
  const std::size_t n = scenario.frame_count();
  Trace trace;
  trace.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;
    state.t = t;
    const PlantParams pk =
        noisy ? perturb_params(params, scenario.noise_std_R,
                               scenario.noise_std_C, rng)
              : params;
    const Inputs u = inputs.at(t);
    trace.push_back(
        measure(true_frame(state, u, pk, scenario.mode), scenario.events, t));
    if (k + 1 < n) state = step(state, u, pk, scenario.dt, scenario.mode);
  }
  return trace;
}

}  // namespace fdi
