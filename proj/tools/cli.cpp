#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "fdi/errors.hpp"
#include "fdi/fitness.hpp"
#include "fdi/format.hpp"
#include "fdi/harness.hpp"
#include "fdi/io.hpp"
#include "fdi/presets.hpp"
#include "fdi/render.hpp"
#include "fdi/tuner.hpp"

namespace fdi::cli {

namespace fs = std::filesystem;

namespace {

struct SuiteSource {
  std::string file;
  int generate{0};
  std::string spec_file;
  bool noise_off{false};
  std::string write_suite;
};

void add_suite_options(CLI::App* sub, SuiteSource& s) {
  sub->add_option("--suite", s.file, "Scenario suite JSON");
  sub->add_option("--generate", s.generate, "Generate a suite of N scenarios instead")
      ->check(CLI::PositiveNumber);
  sub->add_option("--suite-spec", s.spec_file, "JSON overrides for suite generation");
  sub->add_flag("--noise-off", s.noise_off, "Generate noise-free scenarios");
  sub->add_option("--write-suite", s.write_suite, "Also write the suite used to this path");
}

PlantParams load_plant(const std::string& path) {
  if (path.empty()) return {};
  return plant_from_json(parse_json(read_file(path), path));
}

DetectorConfig load_detector(const std::string& spec) {
  if (auto preset = presets::by_name(spec)) return *preset;
  return detector_from_json(parse_json(read_file(spec), spec));
}

// Suites come from a file, or are generated; 50 scenarios by default.
std::vector<FaultScenario> load_suite(const SuiteSource& s, std::uint64_t seed,
                                      const PlantParams& plant, Json& run) {
  std::vector<FaultScenario> suite;
  if (!s.file.empty()) {
    if (s.generate > 0) throw ConfigError("--suite and --generate are mutually exclusive");
    suite = suite_from_json(parse_json(read_file(s.file), s.file));
    if (suite.empty()) throw ConfigError(s.file + ": suite holds no scenarios");
    run["suite"] = s.file;
  } else {
    SuiteSpec spec;
    if (!s.spec_file.empty()) {
      spec = suite_spec_from_json(parse_json(read_file(s.spec_file), s.spec_file));
    }
    if (s.noise_off) spec.noise_std_R = spec.noise_std_C = 0.0;
    const int n = s.generate > 0 ? s.generate : 50;
    suite = generate_suite(n, seed, spec, plant);
    run["generate"] = n;
    run["suite_spec"] = to_json(spec);
  }
  if (!s.write_suite.empty()) write_file(s.write_suite, dump(suite_to_json(suite)));
  return suite;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

Json run_header(const std::string& command, const std::vector<std::string>& argv) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["argv"] = argv;
  return j;
}

Degrees final_degrees(const DetectorConfig& cfg, const PreparedScenario& p) {
  FuzzyDetectorModel model(cfg);
  DetectionStep last;
  for (const ResidualVector& r : p.residuals) last = model.step(r);
  return last.degrees;
}

bool color_enabled(bool no_color_flag) {
  const char* env = std::getenv("NO_COLOR");
  return !no_color_flag && (env == nullptr || *env == '\0');
}

void write_renders(const std::string& dir, const DetectorConfig& cfg,
                   const std::vector<PreparedScenario>& prepared, const std::string& prefix) {
  const CausalGraph graph = CausalGraph::three_tank();
  std::vector<std::pair<fs::path, std::string>> files;
  for (const PreparedScenario& p : prepared) {
    const std::string name = prefix.empty() ? p.scenario.id : prefix + "_" + p.scenario.id;
    files.emplace_back(fs::path(dir) / (name + ".dot"), emit_dot(graph, final_degrees(cfg, p)));
  }
  for (const auto& [path, text] : files) write_file(path, text);
}

std::string config_label(const std::string& spec) {
  if (presets::by_name(spec)) return spec;
  return fs::path(spec).stem().string();
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string scenario, plant, out, residuals, run_config;
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  const PlantParams plant = load_plant(a.plant);
  const std::vector<FaultScenario> suite =
      suite_from_json(parse_json(read_file(a.scenario), a.scenario));
  if (suite.size() != 1) throw ConfigError(a.scenario + ": expected exactly one scenario");
  const FaultScenario& s = suite.front();
  const Trace trace = run(s, plant);
  const ResidualTrace residuals = residual_trace(trace, plant, s.dt);

  const fs::path out(a.out);
  const fs::path res = a.residuals.empty() ? sibling(out, "_residuals.csv") : fs::path(a.residuals);
  Json runcfg = run_header("simulate", argv);
  runcfg["scenario"] = to_json(s);
  runcfg["plant"] = to_json(plant);
  write_file(out, trace_csv(trace));
  write_file(res, residual_csv(residuals));
  write_file(a.run_config.empty() ? sibling(out, ".run.json") : fs::path(a.run_config),
             dump(runcfg));
  std::cout << "wrote " << trace.size() << " frames to " << out.string() << " and "
            << res.string() << "\n";
  return kExitOk;
}

// ---- tune -----------------------------------------------------------------

struct TuneArgs {
  std::string method{"pso"};
  SuiteSource suite;
  std::uint64_t seed{42};
  std::string hyper, plant, out, history, run_config, base;
  int jobs{1};
  std::optional<int> swarm_size, iterations, population, max_generations, stall_generations,
      elite_count;
  std::optional<double> c1, c2, crossover_fraction, mutation_rate;
};

int cmd_tune(const TuneArgs& a, const std::vector<std::string>& argv) {
  const PlantParams plant = load_plant(a.plant);
  Json hyper = Json::object();
  if (!a.hyper.empty()) hyper = parse_json(read_file(a.hyper), a.hyper);
  if (!hyper.is_object()) throw ConfigError(a.hyper + ": expected an object");

  DetectorConfig base;
  if (!a.base.empty()) base = load_detector(a.base);

  Json runcfg = run_header("tune", argv);
  runcfg["method"] = a.method;
  runcfg["seed"] = a.seed;
  const std::vector<FaultScenario> suite = load_suite(a.suite, a.seed, plant, runcfg);
  runcfg["plant"] = to_json(plant);

  FitnessEvaluator fitness(prepare_suite(suite, plant, {}, a.jobs), base);
  const Evaluator eval = [&fitness](std::span<const double> x) { return fitness(x); };

  TuneResult result;
  if (a.method == "pso") {
    PsoParams p;
    p.seed = a.seed;
    if (hyper.contains("pso")) p = pso_from_json(hyper.at("pso"), p);
    if (a.swarm_size) p.swarm_size = *a.swarm_size;
    if (a.iterations) p.iterations = *a.iterations;
    if (a.c1) p.c1 = *a.c1;
    if (a.c2) p.c2 = *a.c2;
    p.validate();
    runcfg["pso"] = to_json(p);
    result = pso_tune(eval, p, a.jobs);
  } else {
    GaParams p;
    p.seed = a.seed;
    if (hyper.contains("ga")) p = ga_from_json(hyper.at("ga"), p);
    if (a.population) p.population = *a.population;
    if (a.max_generations) p.max_generations = *a.max_generations;
    if (a.stall_generations) {
      p.stall_generations = *a.stall_generations;
    } else {
      p.stall_generations = std::min(p.stall_generations, p.max_generations);
    }
    if (a.elite_count) p.elite_count = *a.elite_count;
    if (a.crossover_fraction) p.crossover_fraction = *a.crossover_fraction;
    if (a.mutation_rate) p.mutation_rate = *a.mutation_rate;
    p.validate();
    runcfg["ga"] = to_json(p);
    result = ga_tune(eval, p, a.jobs);
  }

  const DetectorConfig tuned = params_to_config(result.best, base).config;
  const FitnessReport report = fitness.report(result.best);
  runcfg["base"] = to_json(base);

  const fs::path out(a.out);
  write_file(out, dump(to_json(tuned)));
  write_file(a.history.empty() ? sibling(out, "_history.csv") : fs::path(a.history),
             history_csv(result.history));
  write_file(a.run_config.empty() ? sibling(out, ".run.json") : fs::path(a.run_config),
             dump(runcfg));
  std::cout << "final fitness " << format_double(result.best_fitness) << " (error rate "
            << format_fixed(report.error_rate, 3) << ", mean delay "
            << format_fixed(report.mean_delay, 2) << " s)\n";
  return kExitOk;
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
  std::string config{"pso-reference"}, scenario, plant, out, render, run_config;
  bool no_color{false};
};

int cmd_detect(const DetectArgs& a, const std::vector<std::string>& argv) {
  const PlantParams plant = load_plant(a.plant);
  const DetectorConfig cfg = load_detector(a.config);
  const std::vector<FaultScenario> suite =
      suite_from_json(parse_json(read_file(a.scenario), a.scenario));
  if (suite.size() != 1) throw ConfigError(a.scenario + ": expected exactly one scenario");
  const PreparedScenario prepared = prepare(suite.front(), plant);

  std::string csv = "t";
  for (Variable v : kAllVariables) csv += ",deg_" + std::string(variable_name(v));
  for (Variable v : kAllVariables) csv += ",flag_" + std::string(variable_name(v));
  csv += '\n';
  FuzzyDetectorModel model(cfg);
  FlagTimes first_flag;
  DetectionStep last;
  for (const ResidualVector& r : prepared.residuals) {
    last = model.step(r);
    csv += format_double(r.t);
    for (double d : last.degrees) csv += ',' + format_double(d);
    for (std::size_t v = 0; v < kVariableCount; ++v) {
      csv += last.flags.test(v) ? ",1" : ",0";
      if (last.flags.test(v) && !first_flag[v]) first_flag[v] = r.t;
    }
    csv += '\n';
  }
  const DetectionReport report = classify(prepared.scenario, first_flag);

  Json runcfg = run_header("detect", argv);
  runcfg["config"] = to_json(cfg);
  runcfg["scenario"] = to_json(prepared.scenario);
  runcfg["plant"] = to_json(plant);
  if (!a.out.empty()) {
    write_file(a.out, csv);
    write_file(a.run_config.empty() ? sibling(a.out, ".run.json") : fs::path(a.run_config),
               dump(runcfg));
  } else if (!a.run_config.empty()) {
    write_file(a.run_config, dump(runcfg));
  }
  if (!a.render.empty()) write_file(a.render, emit_dot(CausalGraph::three_tank(), last.degrees));

  std::cout << emit_ansi(last.degrees, color_enabled(a.no_color));
  std::cout << "injected " << format_set(report.injected) << ", flagged "
            << format_set(report.flagged()) << ": " << classification_name(report.classification)
            << "\n";
  return kExitOk;
}

// ---- evaluate / compare ---------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> configs;
  SuiteSource suite;
  std::uint64_t seed{42};
  std::string plant, out, reports, render, run_config;
  int jobs{1};
};

int cmd_evaluate(const EvaluateArgs& a, bool comparing, const std::vector<std::string>& argv) {
  const PlantParams plant = load_plant(a.plant);
  std::vector<NamedConfig> configs;
  for (const std::string& spec : a.configs) {
    const std::size_t eq = spec.find('=');
    if (eq != std::string::npos && !presets::by_name(spec)) {
      configs.push_back({spec.substr(0, eq), load_detector(spec.substr(eq + 1))});
    } else {
      configs.push_back({config_label(spec), load_detector(spec)});
    }
  }
  if (comparing && configs.size() < 2) throw ConfigError("compare needs at least two --config");
  if (!comparing && configs.size() != 1) throw ConfigError("evaluate takes exactly one --config");

  Json runcfg = run_header(comparing ? "compare" : "evaluate", argv);
  runcfg["seed"] = a.seed;
  const std::vector<FaultScenario> suite = load_suite(a.suite, a.seed, plant, runcfg);
  runcfg["plant"] = to_json(plant);
  Json cfgs = Json::object();
  for (const NamedConfig& c : configs) cfgs[c.name] = to_json(c.config);
  runcfg["configs"] = cfgs;

  const std::vector<PreparedScenario> prepared = prepare_suite(suite, plant, {}, a.jobs);
  std::vector<NamedEvaluation> rows;
  for (const NamedConfig& c : configs) {
    try {
      rows.push_back({c.name, evaluate_prepared(c.config, prepared, a.jobs)});
    } catch (const ConfigError& e) {
      throw ConfigError(c.name + ": " + e.what());
    }
  }

  if (!a.out.empty()) {
    write_file(a.out, metrics_csv(rows));
    write_file(a.run_config.empty() ? sibling(a.out, ".run.json") : fs::path(a.run_config),
               dump(runcfg));
  } else if (!a.run_config.empty()) {
    write_file(a.run_config, dump(runcfg));
  }
  if (!a.reports.empty()) {
    std::string lines;
    for (const NamedEvaluation& row : rows) {
      for (const DetectionReport& r : row.evaluation.reports) {
        Json j = to_json(r);
        if (comparing) j["config"] = row.name;
        lines += j.dump() + '\n';
      }
    }
    write_file(a.reports, lines);
  }
  if (!a.render.empty()) {
    for (const NamedConfig& c : configs) {
      write_renders(a.render, c.config, prepared, comparing ? c.name : "");
    }
  }
  std::cout << comparison_table(rows);
  return kExitOk;
}

// ---- render ---------------------------------------------------------------

struct RenderArgs {
  std::vector<double> degrees;
  std::string config{"pso-reference"}, scenario, plant, format{"dot"}, out;
  bool no_color{false};
};

int cmd_render(const RenderArgs& a) {
  Degrees degrees{};
  if (!a.degrees.empty()) {
    if (a.degrees.size() != kVariableCount) throw ConfigError("--degrees takes seven values");
    std::copy(a.degrees.begin(), a.degrees.end(), degrees.begin());
  } else if (!a.scenario.empty()) {
    const std::vector<FaultScenario> suite =
        suite_from_json(parse_json(read_file(a.scenario), a.scenario));
    if (suite.size() != 1) throw ConfigError(a.scenario + ": expected exactly one scenario");
    degrees = final_degrees(load_detector(a.config), prepare(suite.front(), load_plant(a.plant)));
  }
  const std::string text = a.format == "dot"
                               ? emit_dot(CausalGraph::three_tank(), degrees)
                               : emit_ansi(degrees, color_enabled(a.no_color));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, bool allow_replay);

int cmd_replay(const std::string& path) {
  const Json j = parse_json(read_file(path), path);
  if (!j.is_object() || !j.contains("argv") || !j.at("argv").is_array()) {
    throw ConfigError(path + ".argv: missing or not an array");
  }
  std::vector<std::string> argv;
  for (const Json& a : j.at("argv")) {
    if (!a.is_string()) throw ConfigError(path + ".argv: expected strings");
    argv.push_back(a.get<std::string>());
  }
  return dispatch(argv, false);
}

int dispatch(const std::vector<std::string>& args, bool allow_replay) {
  CLI::App app{"Fuzzy multiple-fault detection on the three-tank process", "fdi"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a scenario; write trace and residual CSVs");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
  simulate->add_option("--plant", sim.plant, "Plant parameter JSON");
  simulate->add_option("--out", sim.out, "Trace CSV")->required();
  simulate->add_option("--residuals", sim.residuals, "Residual CSV (default <out>_residuals.csv)");
  simulate->add_option("--run-config", sim.run_config, "Run config JSON (default <out>.run.json)");

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Tune membership bounds by PSO or GA");
  tune_cmd->add_option("--method", tune.method, "pso or ga")
      ->check(CLI::IsMember({"pso", "ga"}));
  add_suite_options(tune_cmd, tune.suite);
  tune_cmd->add_option("--seed", tune.seed, "Seed for suite generation and the optimizer");
  tune_cmd->add_option("--hyper", tune.hyper, "Hyperparameter JSON with \"pso\"/\"ga\" objects");
  tune_cmd->add_option("--base", tune.base, "Preset or config JSON supplying rule base, beta, threshold, debounce");
  tune_cmd->add_option("--plant", tune.plant, "Plant parameter JSON");
  tune_cmd->add_option("--out", tune.out, "Tuned detector config JSON")->required();
  tune_cmd->add_option("--history", tune.history, "History CSV (default <out>_history.csv)");
  tune_cmd->add_option("--run-config", tune.run_config, "Run config JSON (default <out>.run.json)");
  tune_cmd->add_option("--jobs", tune.jobs, "Parallel fitness evaluations")->check(CLI::PositiveNumber);
  tune_cmd->add_option("--swarm-size", tune.swarm_size);
  tune_cmd->add_option("--iterations", tune.iterations);
  tune_cmd->add_option("--c1", tune.c1);
  tune_cmd->add_option("--c2", tune.c2);
  tune_cmd->add_option("--population", tune.population);
  tune_cmd->add_option("--max-generations", tune.max_generations);
  tune_cmd->add_option("--stall-generations", tune.stall_generations);
  tune_cmd->add_option("--elite-count", tune.elite_count);
  tune_cmd->add_option("--crossover-fraction", tune.crossover_fraction);
  tune_cmd->add_option("--mutation-rate", tune.mutation_rate);

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Run one detector over one scenario");
  detect_cmd->add_option("--config", det.config, "Preset name or detector config JSON");
  detect_cmd->add_option("--scenario", det.scenario, "Scenario JSON")->required();
  detect_cmd->add_option("--plant", det.plant, "Plant parameter JSON");
  detect_cmd->add_option("--out", det.out, "Per-sample degree and flag CSV");
  detect_cmd->add_option("--render", det.render, "DOT file of the final degrees");
  detect_cmd->add_option("--run-config", det.run_config, "Run config JSON (default <out>.run.json)");
  detect_cmd->add_flag("--no-color", det.no_color, "Plain-text summary");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score one detector on a scenario suite");
  EvaluateArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Score several detectors on the same suite");
  for (auto [sub, args] : {std::pair{evaluate_cmd, &ev}, std::pair{compare_cmd, &cmp}}) {
    sub->add_option("--config", args->configs, "Preset name, config JSON or name=path")
        ->required();
    add_suite_options(sub, args->suite);
    sub->add_option("--seed", args->seed, "Seed for suite generation");
    sub->add_option("--plant", args->plant, "Plant parameter JSON");
    sub->add_option("--out", args->out, "Metrics CSV");
    sub->add_option("--reports", args->reports, "Per-scenario reports as JSON lines");
    sub->add_option("--render", args->render, "Directory for per-scenario DOT files");
    sub->add_option("--run-config", args->run_config, "Run config JSON (default <out>.run.json)");
    sub->add_option("--jobs", args->jobs, "Parallel scenario evaluations")
        ->check(CLI::PositiveNumber);
  }

  RenderArgs ren;
  auto* render_cmd = app.add_subcommand("render", "Render alarm degrees as DOT or ANSI text");
  render_cmd->add_option("--degrees", ren.degrees, "Seven degrees in variable order")
      ->delimiter(',');
  render_cmd->add_option("--config", ren.config, "Detector for --scenario");
  render_cmd->add_option("--scenario", ren.scenario, "Render the final degrees of this scenario");
  render_cmd->add_option("--plant", ren.plant, "Plant parameter JSON");
  render_cmd->add_option("--format", ren.format, "dot or ansi")
      ->check(CLI::IsMember({"dot", "ansi"}));
  render_cmd->add_option("--out", ren.out, "Output file (default stdout)");
  render_cmd->add_flag("--no-color", ren.no_color, "Plain text for the ansi format");

  std::string replay_path;
  CLI::App* replay_cmd = nullptr;
  if (allow_replay) {
    replay_cmd = app.add_subcommand("replay", "Re-run a command from its run config JSON");
    replay_cmd->add_option("run_config", replay_path, "Run config JSON")->required();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, std::cerr);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (simulate->parsed()) return cmd_simulate(sim, args);
  if (tune_cmd->parsed()) return cmd_tune(tune, args);
  if (detect_cmd->parsed()) return cmd_detect(det, args);
  if (evaluate_cmd->parsed()) return cmd_evaluate(ev, false, args);
  if (compare_cmd->parsed()) return cmd_evaluate(cmp, true, args);
  if (render_cmd->parsed()) return cmd_render(ren);
  if (replay_cmd != nullptr && replay_cmd->parsed()) return cmd_replay(replay_path);
  return kExitConfig;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args, true);
  } catch (const SimulationDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConstraintViolated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace fdi::cli
