// Acceptance runner: one PASS/FAIL line per criterion.
//
// Exit status is 0 only when every criterion passes, except those listed in
// --expect-fail, which are still evaluated and reported as FAIL but do not
// change the exit status. An expected failure that passes is reported too.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fdi/errors.hpp"
#include "fdi/fitness.hpp"
#include "fdi/format.hpp"
#include "fdi/harness.hpp"
#include "fdi/io.hpp"
#include "fdi/plant.hpp"
#include "fdi/presets.hpp"
#include "fdi/render.hpp"
#include "fdi/residuals.hpp"
#include "fdi/tuner.hpp"

namespace fs = std::filesystem;
using namespace fdi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass{true};
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fx(double x, int digits = 4) { return format_fixed(x, digits); }

std::string rate_str(const SuiteMetrics& m) {
  return std::to_string(m.proper) + "/" + std::to_string(m.scenarios) + " = " +
         fx(m.proper_rate, 3);
}

bool budget(Outcome& o, Clock::time_point t0, double limit) {
  const double s = seconds_since(t0);
  const bool ok = s < limit;
  o.check(ok, "runtime " + fx(s, 2) + " s (budget " + fx(limit, 0) + " s)");
  return ok;
}

// ---- 1 ----------------------------------------------------------------------

Outcome residual_nullity() {
  Outcome o;
  const auto t0 = Clock::now();
  FaultScenario s;
  s.id = "fault_free";
  s.duration = 100.0;
  s.dt = 0.1;
  s.noise_std_R = s.noise_std_C = 0.0;
  s.mode = PlantMode::Linear;
  const PlantParams plant;
  const ResidualTrace r = residual_trace(run(s, plant), plant, s.dt);
  for (std::size_t j = 0; j < kArrCount; ++j) {
    double worst = 0.0;
    for (const ResidualVector& v : r) worst = std::max(worst, std::abs(v[j]));
    std::ostringstream msg;
    msg << "max|ARR" << j + 1 << "| = " << format_double(worst) << " < 1e-6";
    o.check(worst < 1e-6, msg.str());
  }
  budget(o, t0, 1.0);
  return o;
}

// ---- 2 ----------------------------------------------------------------------

Outcome constriction_factor() {
  Outcome o;
  const double k = constriction(2.8, 1.3);
  o.check(std::abs(k - 0.7298) <= 1e-4, "K(2.8, 1.3) = " + format_double(k));
  for (const auto& [c1, c2] : {std::pair{2.0, 2.0}, {1.0, 1.5}, {0.0, 0.0}}) {
    bool raised = false;
    try {
      constriction(c1, c2);
    } catch (const ConstraintViolated&) {
      raised = true;
    }
    o.check(raised, "c = " + format_double(c1 + c2) + " raises ConstraintViolated");
  }
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome signature_activation() {
  Outcome o;
  const auto t0 = Clock::now();
  const PlantParams plant;
  const double onset = 10.0, settle = 40.0;
  auto window_of = [&](const ResidualTrace& r) {
    std::vector<ResidualVector> w;
    for (const ResidualVector& v : r) {
      if (v.t >= settle) w.push_back(v);
    }
    return w;
  };

  FaultScenario base;
  base.duration = 80.0;
  base.seed = 42;
  base.noise_std_R = base.noise_std_C = 0.05;
  const auto free_w = window_of(prepare(base, plant).residuals);
  std::array<double, kArrCount> mean_free{}, floor{};
  for (std::size_t j = 0; j < kArrCount; ++j) {
    for (const auto& v : free_w) mean_free[j] += v[j];
    mean_free[j] /= static_cast<double>(free_w.size());
    for (const auto& v : free_w) floor[j] = std::max(floor[j], std::abs(v[j]));
  }
  {
    std::ostringstream msg;
    msg << "fault-free noise floor max|r| per ARR:";
    for (double f : floor) msg << ' ' << format_double(f);
    o.note(msg.str());
  }

  for (Variable v : kAllVariables) {
    FaultScenario s = base;
    s.id = std::string(variable_name(v));
    s.events = {{v, onset, 2.0}};
    const auto w = window_of(prepare(s, plant).residuals);
    std::string hit;
    bool ok = true;
    for (std::size_t j = 0; j < kArrCount; ++j) {
      double mean = 0.0;
      for (const auto& x : w) mean += x[j];
      mean /= static_cast<double>(w.size());
      const bool active = std::abs(mean - mean_free[j]) > 3.0 * floor[j];
      ok = ok && active == signature_matrix()[index(v)].test(j);
      hit += active ? '1' : '0';
    }
    o.check(ok, std::string(variable_name(v)) + " perturbs ARR1..5 = " + hit);
  }
  budget(o, t0, 10.0);
  return o;
}

// ---- 4 ----------------------------------------------------------------------

Outcome compensation_case() {
  Outcome o;
  const auto t0 = Clock::now();
  const PlantParams plant;
  FaultScenario free;
  free.id = "free";
  free.duration = 80.0;
  free.noise_std_R = free.noise_std_C = 0.0;
  FaultScenario pair = free;
  pair.id = "compensation";
  const auto events = compensation_pair(2.0, 20.0, plant);
  pair.events.assign(events.begin(), events.end());

  const PreparedScenario p_free = prepare(free, plant);
  const PreparedScenario p_pair = prepare(pair, plant);
  const double d_arr2 = std::abs(p_pair.residuals.back()[1] - p_free.residuals.back()[1]);
  o.check(d_arr2 < 1e-9, "steady-state |dARR2| = " + format_double(d_arr2) + " < 1e-9");
  o.note("De2 magnitude " + format_double(events[0].magnitude) + ", Df2 magnitude " +
         format_double(events[1].magnitude));

  const DetectorConfig cfg = presets::pso_reference();
  FuzzyDetectorModel model(cfg);
  const DetectionReport rep = run_detector(model, p_pair);
  const VariableSet flagged = rep.flagged();
  o.check(flagged.test(index(Variable::De2)) && flagged.test(index(Variable::Df2)),
          "tuned detector flags " + format_set(flagged) + " (needs De2 and Df2)");
  o.note("classification: " + std::string(classification_name(rep.classification)));
  budget(o, t0, 5.0);
  return o;
}

// ---- 5 ----------------------------------------------------------------------

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void check_optimizer(Outcome& o, const std::string& name, const TuneResult& r) {
  const double optimum = 2.0;  // at (1, 1) on [1, 5]^2
  o.check(std::abs(r.best_fitness - optimum) <= 1e-2,
          name + " best " + format_double(r.best_fitness) + " within 1e-2 of 2");
  const bool at_corner =
      std::abs(r.best[0] - 1.0) <= 1e-2 && std::abs(r.best[1] - 1.0) <= 1e-2;
  o.check(at_corner, name + " best point (" + fx(r.best[0], 5) + ", " + fx(r.best[1], 5) + ")");
  bool monotone = true;
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    monotone = monotone && r.history[i].best_fitness <= r.history[i - 1].best_fitness;
  }
  o.check(monotone, name + " history monotone over " + std::to_string(r.history.size()) + " rows");
}

Outcome optimizer_oracle() {
  Outcome o;
  const Bounds box{{1.0, 5.0}, {1.0, 5.0}};
  auto t0 = Clock::now();
  PsoParams pso;
  pso.swarm_size = 30;
  pso.iterations = 200;
  pso.bounds = box;
  check_optimizer(o, "PSO", pso_tune(sphere, pso));
  budget(o, t0, 5.0);

  t0 = Clock::now();
  GaParams ga;
  ga.population = 30;
  ga.max_generations = 100;
  ga.stall_generations = 100;
  ga.bounds = box;
  check_optimizer(o, "GA", ga_tune(sphere, ga));
  budget(o, t0, 5.0);
  return o;
}

// ---- 6 and 7 --------------------------------------------------------------

struct TuningContext {
  PlantParams plant;
  std::vector<FaultScenario> suite;
  std::vector<PreparedScenario> prepared;
  std::vector<PreparedScenario> holdout;
  int jobs{1};
  std::optional<DetectorConfig> pso_tuned;
  std::optional<DetectorConfig> ga_tuned;
};

Outcome pso_tuning(TuningContext& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  const DetectorConfig base;
  FitnessEvaluator fitness(ctx.prepared, base);
  PsoParams p;
  p.swarm_size = 30;
  p.iterations = 200;
  p.seed = 42;
  const TuneResult r = pso_tune([&](std::span<const double> x) { return fitness(x); }, p, ctx.jobs);
  ctx.pso_tuned = params_to_config(r.best, base).config;

  const SuiteMetrics tuned = evaluate_prepared(*ctx.pso_tuned, ctx.prepared, ctx.jobs).metrics;
  const SuiteMetrics untuned = evaluate_prepared(presets::detuned(), ctx.prepared, ctx.jobs).metrics;
  o.note("final fitness " + format_double(r.best_fitness));
  o.check(tuned.proper_rate >= 0.90, "tuned proper rate " + rate_str(tuned) + " >= 0.90");
  o.check(tuned.proper_rate >= untuned.proper_rate + 0.10,
          "untuned baseline " + rate_str(untuned) + ", gain >= 0.10");
  o.check(tuned.mean_delay < untuned.mean_delay,
          "mean delay tuned " + fx(tuned.mean_delay, 3) + " s < untuned " +
              fx(untuned.mean_delay, 3) + " s");
  const SuiteMetrics held = evaluate_prepared(*ctx.pso_tuned, ctx.holdout, ctx.jobs).metrics;
  o.note("disjoint suite (seed 4242): tuned " + rate_str(held) + ", mean delay " +
         fx(held.mean_delay, 3) + " s");
  budget(o, t0, 15.0 * 60.0);
  return o;
}

Outcome ga_tuning(TuningContext& ctx) {
  Outcome o;
  const auto t0 = Clock::now();
  const DetectorConfig base;
  FitnessEvaluator fitness(ctx.prepared, base);
  GaParams p;
  p.seed = 42;
  const TuneResult r = ga_tune([&](std::span<const double> x) { return fitness(x); }, p, ctx.jobs);
  ctx.ga_tuned = params_to_config(r.best, base).config;
  o.note("final fitness " + format_double(r.best_fitness) + " after " +
         std::to_string(r.history.size()) + " generations");

  std::vector<NamedConfig> configs{{"ga-tuned", *ctx.ga_tuned}};
  if (ctx.pso_tuned) configs.insert(configs.begin(), {"pso-tuned", *ctx.pso_tuned});
  else configs.insert(configs.begin(), {"pso-reference", presets::pso_reference()});
  const auto rows = compare(configs, ctx.suite, ctx.plant, ctx.jobs);
  const SuiteMetrics& ga = rows.back().evaluation.metrics;
  o.check(ga.proper_rate >= 0.85, "GA tuned proper rate " + rate_str(ga) + " >= 0.85");
  bool delays = rows.size() == 2;
  for (const auto& row : rows) delays = delays && std::isfinite(row.evaluation.metrics.mean_delay);
  o.check(delays, "compare emits both rows with delays");
  std::istringstream table(comparison_table(rows));
  for (std::string line; std::getline(table, line);) o.note(line);
  budget(o, t0, 15.0 * 60.0);
  return o;
}

// ---- 8 ----------------------------------------------------------------------

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome detector_invariants() {
  Outcome o;
  const auto t0 = Clock::now();
  const DetectorConfig cfg = presets::pso_reference();

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.5);
  bool symmetric = true;
  for (int i = 0; i < 2000; ++i) {
    ResidualVector r, neg;
    for (std::size_t j = 0; j < kArrCount; ++j) {
      r.r[j] = n(rng);
      neg.r[j] = -r.r[j];
    }
    DetectorState s1, s2;
    const DetectionStep a = detect(r, cfg, s1);
    const DetectionStep b = detect(neg, cfg, s2);
    for (std::size_t v = 0; v < kVariableCount; ++v) {
      symmetric = symmetric && std::abs(a.degrees[v] - b.degrees[v]) <= 1e-12;
    }
  }
  o.check(symmetric, "alarm degrees invariant under residual negation (2000 samples)");

  DetectorState zs;
  const DetectionStep zero = detect(ResidualVector{}, cfg, zs);
  const bool all_zero =
      std::all_of(zero.degrees.begin(), zero.degrees.end(), [](double d) { return d == 0.0; });
  o.check(all_zero, "zero residuals give all degrees 0");
  const std::string golden = read_text(fs::path(FDI_TEST_DATA_DIR) / "golden" / "all_green.dot");
  o.check(!golden.empty() && emit_dot(CausalGraph::three_tank(), zero.degrees) == golden,
          "zero-residual DOT matches the all-green golden file");

  bool unity = true;
  for (const InputPartition& p : cfg.inputs) {
    for (int k = 0; k <= 200; ++k) {
      const double t = k / 200.0;
      for (double x : {p.a1 + t * (p.a2 - p.a1), p.a3 + t * (p.a4 - p.a3)}) {
        for (double sgn : {1.0, -1.0}) {
          const Memberships m = fuzzify(sgn * x, p);
          double sum = 0.0;
          for (double d : m) sum += d;
          unity = unity && std::abs(sum - 1.0) <= 1e-12;
        }
      }
    }
  }
  o.check(unity, "input memberships sum to 1 on every shoulder");

  bool monotone = true;
  for (const OutputPartition& p : cfg.outputs) {
    for (double ok : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      double prev = -1.0;
      for (int k = 0; k <= 100; ++k) {
        const double d = defuzzify(Activation{ok, k / 100.0}, p);
        monotone = monotone && d >= prev - 1e-15;
        prev = d;
      }
    }
  }
  o.check(monotone, "alarm degree non-decreasing in AL activation");

  for (const auto& [name, params] :
       {std::pair{"PSO", presets::pso_reference_params()}, {"GA", presets::ga_reference_params()}}) {
    const RepairedConfig rc = params_to_config(params);
    o.check(!rc.repaired && config_to_params(rc.config) == params,
            std::string(name) + " reference parameters round trip exactly");
  }
  budget(o, t0, 5.0);
  return o;
}

// ---- 9 ----------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / "fdi_acceptance_determinism";
  fs::remove_all(root);
  const std::string scenario = (root / "scenario.json").string();
  {
    FaultScenario s;
    s.id = "det";
    s.seed = 5;
    s.duration = 60.0;
    s.events = {{Variable::De1, 15.0, 1.2}, {Variable::Msf2, 15.0, -0.8}};
    write_file(scenario, dump(to_json(s)));
  }

  auto run_all = [&](const fs::path& dir) {
    const std::string d = dir.string();
    std::vector<std::vector<std::string>> cmds{
        {"simulate", "--scenario", scenario, "--out", d + "/trace.csv"},
        {"tune", "--method", "pso", "--generate", "8", "--swarm-size", "6", "--iterations", "4",
         "--out", d + "/pso.json"},
        {"tune", "--method", "ga", "--generate", "8", "--population", "6", "--max-generations",
         "4", "--out", d + "/ga.json"},
        {"evaluate", "--config", d + "/pso.json", "--generate", "20", "--out", d + "/eval.csv",
         "--reports", d + "/eval.jsonl"},
    };
    bool ok = true;
    std::streambuf* saved = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf(sink.rdbuf());
    for (const auto& c : cmds) ok = ok && cli::run_cli(c) == cli::kExitOk;
    std::cout.rdbuf(saved);
    return ok;
  };
  const bool ran = run_all(root / "a") && run_all(root / "b");
  o.check(ran, "simulate, tune (pso, ga) and evaluate ran twice");

  std::size_t files = 0;
  bool identical = ran;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    const std::string name = e.path().filename().string();
    std::string a = read_text(e.path());
    std::string b = read_text(root / "b" / name);
    // Run configs record the output paths, which differ between the two runs.
    if (name.ends_with(".run.json")) {
      auto strip = [&](std::string& s, const std::string& dir) {
        for (std::size_t pos; (pos = s.find(dir)) != std::string::npos;) s.erase(pos, dir.size());
      };
      strip(a, (root / "a").string());
      strip(b, (root / "b").string());
    }
    const bool same = !a.empty() && a == b;
    identical = identical && same;
    if (!same) o.note("differs: " + name);
    ++files;
  }
  o.check(identical && files >= 10,
          std::to_string(files) + " CSV/JSON artifacts byte-identical across runs");
  fs::remove_all(root);
  budget(o, t0, 15.0 * 60.0);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::vector<int> expect_fail;
  std::vector<int> only;
  int jobs = 1;
  bool verbose = false;
  app.add_option("--expect-fail", expect_fail, "Criteria whose failure does not affect the exit status")
      ->delimiter(',');
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--jobs", jobs, "Parallel evaluations for the tuning criteria")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "Print per-check details");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  const std::set<int> selected(only.begin(), only.end());

  TuningContext ctx;
  ctx.jobs = jobs;
  auto ensure_suite = [&] {
    if (!ctx.prepared.empty()) return;
    ctx.suite = generate_suite(50, 42, SuiteSpec{}, ctx.plant);
    ctx.prepared = prepare_suite(ctx.suite, ctx.plant, {}, jobs);
    ctx.holdout = prepare_suite(generate_suite(50, 4242, SuiteSpec{}, ctx.plant), ctx.plant, {}, jobs);
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"residual nullity", residual_nullity},
      {"constriction factor", constriction_factor},
      {"signature activation", signature_activation},
      {"compensation case", compensation_case},
      {"optimizer oracle", optimizer_oracle},
      {"PSO end-to-end tuning", [&] { ensure_suite(); return pso_tuning(ctx); }},
      {"GA comparison", [&] { ensure_suite(); return ga_tuning(ctx); }},
      {"detector invariants", detector_invariants},
      {"determinism", determinism},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::string suffix;
    if (expected.count(id)) suffix = o.pass ? " (listed as expected failure)" : " (expected)";
    else if (!o.pass) ++unexpected;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first
              << suffix << "\n";
    if (verbose || !o.pass) {
      for (const std::string& d : o.details) std::cout << "    " << d << "\n";
    }
    std::cout.flush();
  }
  return unexpected == 0 ? 0 : 1;
}
