#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdi/variables.hpp"

namespace fdi {

// Physical constants of the three-tank process in SI-normalized units.
// Capacitances store pressure, R1..R3 are outlet resistances and R12/R23
// couple the tanks. The last four fields only matter in nonlinear mode,
// where coupling flows follow the signed square-root orifice law.
struct PlantParams {
  double C1{1.0}, C2{1.0}, C3{1.0};
  double R1{2.0}, R2{2.0}, R3{2.0};
  double R12{1.0}, R23{1.0};
  double az{1.0};
  double S_conn{0.5};
  double g{9.81};
  double rho{1.0};

  void validate() const;
  bool operator==(const PlantParams&) const = default;
};

struct PlantState {
  double De1{0.0}, De2{0.0}, De3{0.0};
  double t{0.0};
};

struct Inputs {
  double Msf1{0.0}, Msf2{0.0};
};

enum class PlantMode { Linear, Nonlinear };
enum class Integrator { Euler, Rk4 };

// The seven supervised signals at one sample, indexed by Variable.
struct MeasurementFrame {
  double t{0.0};
  std::array<double, kVariableCount> values{};

  double& operator[](Variable v) { return values[index(v)]; }
  double operator[](Variable v) const { return values[index(v)]; }
};

using Trace = std::vector<MeasurementFrame>;

struct CouplingFlows {
  double Df1{0.0}, Df2{0.0};
};

// Df1 flows from tank 1 into the middle node, Df2 from tank 3.
CouplingFlows coupling_flows(const PlantState& s, const PlantParams& p,
                             PlantMode mode);

// Signed orifice flow between two pressures; odd in (pi - pj).
double orifice_flow(double pi, double pj, const PlantParams& p);

// One fixed step of the tank dynamics. Throws SimulationDiverged when the
// result is not finite.
PlantState step(const PlantState& state, Inputs inputs, const PlantParams& p,
                double dt, PlantMode mode = PlantMode::Linear,
                Integrator integrator = Integrator::Rk4);

// Steady state of the linear model for constant inputs.
PlantState equilibrium(Inputs inputs, const PlantParams& p);

MeasurementFrame true_frame(const PlantState& s, Inputs inputs,
                            const PlantParams& p, PlantMode mode);

enum class FaultProfile { Step, Ramp };

// Additive offset on one supervised channel. A ramp grows at `slope` from
// `start` and saturates at `magnitude`.
struct FaultEvent {
  Variable target{Variable::Msf1};
  double start{0.0};
  double magnitude{0.0};
  FaultProfile profile{FaultProfile::Step};
  double slope{0.0};

  double offset_at(double t) const;
  bool operator==(const FaultEvent&) const = default;
};

struct FaultScenario {
  std::string id;
  std::uint64_t seed{42};
  double duration{80.0};
  double dt{0.1};
  double noise_std_R{0.0};
  double noise_std_C{0.0};
  PlantMode mode{PlantMode::Linear};
  std::vector<FaultEvent> events;

  void validate() const;
  std::size_t frame_count() const;
  VariableSet injected() const;
  bool operator==(const FaultScenario&) const = default;
};

// Sensor/actuator reading = true value + every active offset on its channel.
MeasurementFrame measure(const MeasurementFrame& truth,
                         std::span<const FaultEvent> events, double t);

// Multiplies each R and C by (1 + N(0, sigma)); floors at 1% of nominal.
PlantParams perturb_params(const PlantParams& p, double noise_std_R,
                           double noise_std_C, std::mt19937_64& rng);

// Piecewise-constant source flows. Each breakpoint holds from its time on.
struct InputSchedule {
  std::vector<std::pair<double, Inputs>> breakpoints{{0.0, Inputs{1.0, 0.6}}};

  Inputs at(double t) const;
  static InputSchedule constant(Inputs inputs);
};

// Simulates the scenario from `initial` (default: the linear equilibrium of
// the inputs at t = 0). Noise, when enabled, re-samples R and C every step.
Trace run(const FaultScenario& scenario, const PlantParams& params,
          const InputSchedule& inputs = {},
          std::optional<PlantState> initial = std::nullopt);

}  // namespace fdi
