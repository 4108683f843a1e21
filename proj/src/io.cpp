#include "fdi/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fdi/errors.hpp"
#include "fdi/format.hpp"

namespace fdi {

namespace {

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& at(const std::string& key) {
    if (!has(key)) fail(field(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? as_number(j_.at(key), field(key)) : fallback;
  }
  double number(const std::string& key) { return as_number(at(key), field(key)); }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) fail(field(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned()) fail(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return as_string(j_.at(key), field(key));
  }
  std::string string(const std::string& key) { return as_string(at(key), field(key)); }

  void schema() {
    const Json& v = at("schema");
    if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
      fail(field("schema"), "unsupported schema version (expected 1)");
    }
  }

  // Overlay documents may omit the version; a present one must match.
  void optional_schema() {
    if (j_.is_object() && j_.contains("schema")) schema();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(field(key), "unknown field");
    }
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

 private:
  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }
  static std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string_view mode_name(PlantMode m) {
  return m == PlantMode::Linear ? "linear" : "nonlinear";
}

PlantMode parse_mode(const std::string& s, const std::string& path) {
  if (s == "linear") return PlantMode::Linear;
  if (s == "nonlinear") return PlantMode::Nonlinear;
  ObjectReader::fail(path, "expected \"linear\" or \"nonlinear\", got \"" + s + "\"");
}

std::string_view inference_name(InferenceMode m) {
  return m == InferenceMode::Signature ? "signature" : "parsimonious";
}

InferenceMode parse_inference(const std::string& s, const std::string& path) {
  if (s == "signature") return InferenceMode::Signature;
  if (s == "parsimonious") return InferenceMode::Parsimonious;
  ObjectReader::fail(path, "expected \"signature\" or \"parsimonious\", got \"" + s + "\"");
}

Variable parse_target(const std::string& s, const std::string& path) {
  const auto v = parse_variable(s);
  if (!v) ObjectReader::fail(path, "unknown variable \"" + s + "\"");
  return *v;
}

Json bounds_to_json(const Bounds& b) {
  Json out = Json::array();
  for (const Interval& iv : b) out.push_back(Json::array({iv.lo, iv.hi}));
  return out;
}

Bounds bounds_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) ObjectReader::fail(path, "expected an array of [lo, hi] pairs");
  Bounds b;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& p = j[i];
    const std::string where = path + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      ObjectReader::fail(where, "expected [lo, hi]");
    }
    b.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return b;
}

Json range_to_json(Range r) { return Json::array({r.lo, r.hi}); }

Range range_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    ObjectReader::fail(path, "expected [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json variable_map(const FlagTimes& times) {
  Json out = Json::object();
  for (Variable v : kAllVariables) {
    if (times[index(v)]) out[std::string(variable_name(v))] = *times[index(v)];
  }
  return out;
}

Json set_to_json(const VariableSet& s) {
  Json out = Json::array();
  for (Variable v : kAllVariables) {
    if (s.test(index(v))) out.push_back(std::string(variable_name(v)));
  }
  return out;
}

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset =
        std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::string_view head = text.substr(0, offset);
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(head.begin(), head.end(), '\n'));
    const std::size_t nl = head.rfind('\n');
    const std::size_t column = nl == std::string_view::npos ? offset + 1 : offset - nl;
    std::string what = e.what();
    const std::size_t colon = what.find(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + what);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

Json to_json(const FaultEvent& e) {
  Json j;
  j["target"] = std::string(variable_name(e.target));
  j["start"] = e.start;
  j["magnitude"] = e.magnitude;
  j["profile"] = e.profile == FaultProfile::Step ? "step" : "ramp";
  if (e.profile == FaultProfile::Ramp) j["slope"] = e.slope;
  return j;
}

Json to_json(const FaultScenario& s) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["id"] = s.id;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["dt"] = s.dt;
  j["noise_std_R"] = s.noise_std_R;
  j["noise_std_C"] = s.noise_std_C;
  j["mode"] = std::string(mode_name(s.mode));
  j["events"] = Json::array();
  for (const FaultEvent& e : s.events) j["events"].push_back(to_json(e));
  return j;
}

Json suite_to_json(const std::vector<FaultScenario>& suite) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["scenarios"] = Json::array();
  for (const FaultScenario& s : suite) {
    Json item = to_json(s);
    item.erase("schema");
    j["scenarios"].push_back(std::move(item));
  }
  return j;
}

namespace {

FaultScenario scenario_body(ObjectReader& r, const std::string& path) {
  FaultScenario s;
  s.id = r.string("id", "");
  s.seed = r.seed("seed", s.seed);
  s.duration = r.number("duration", s.duration);
  s.dt = r.number("dt", s.dt);
  s.noise_std_R = r.number("noise_std_R", s.noise_std_R);
  s.noise_std_C = r.number("noise_std_C", s.noise_std_C);
  s.mode = parse_mode(r.string("mode", "linear"), r.field("mode"));
  const Json& events = r.at("events");
  if (!events.is_array()) ObjectReader::fail(r.field("events"), "expected an array");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string where = path + ".events[" + std::to_string(i) + "]";
    ObjectReader er(events[i], where);
    FaultEvent e;
    e.target = parse_target(er.string("target"), er.field("target"));
    e.start = er.number("start");
    e.magnitude = er.number("magnitude");
    const std::string profile = er.string("profile", "step");
    if (profile == "step") {
      e.profile = FaultProfile::Step;
    } else if (profile == "ramp") {
      e.profile = FaultProfile::Ramp;
      e.slope = er.number("slope");
    } else {
      ObjectReader::fail(er.field("profile"), "expected \"step\" or \"ramp\"");
    }
    er.finish();
    s.events.push_back(e);
  }
  r.finish();
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return s;
}

}  // namespace

FaultScenario scenario_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  r.schema();
  return scenario_body(r, path);
}

std::vector<FaultScenario> suite_from_json(const Json& j) {
  if (j.is_object() && !j.contains("scenarios")) return {scenario_from_json(j)};
  ObjectReader r(j, "suite");
  r.schema();
  const Json& list = r.at("scenarios");
  if (!list.is_array()) ObjectReader::fail("suite.scenarios", "expected an array");
  r.finish();
  std::vector<FaultScenario> suite;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "suite.scenarios[" + std::to_string(i) + "]";
    ObjectReader sr(list[i], where);
    sr.has("schema");  // optional inside a suite
    suite.push_back(scenario_body(sr, where));
  }
  return suite;
}

Json to_json(const PlantParams& p) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["C1"] = p.C1;
  j["C2"] = p.C2;
  j["C3"] = p.C3;
  j["R1"] = p.R1;
  j["R2"] = p.R2;
  j["R3"] = p.R3;
  j["R12"] = p.R12;
  j["R23"] = p.R23;
  j["az"] = p.az;
  j["S_conn"] = p.S_conn;
  j["g"] = p.g;
  j["rho"] = p.rho;
  return j;
}

PlantParams plant_from_json(const Json& j) {
  ObjectReader r(j, "plant");
  r.schema();
  PlantParams p;
  p.C1 = r.number("C1", p.C1);
  p.C2 = r.number("C2", p.C2);
  p.C3 = r.number("C3", p.C3);
  p.R1 = r.number("R1", p.R1);
  p.R2 = r.number("R2", p.R2);
  p.R3 = r.number("R3", p.R3);
  p.R12 = r.number("R12", p.R12);
  p.R23 = r.number("R23", p.R23);
  p.az = r.number("az", p.az);
  p.S_conn = r.number("S_conn", p.S_conn);
  p.g = r.number("g", p.g);
  p.rho = r.number("rho", p.rho);
  r.finish();
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("plant: ") + e.what());
  }
  return p;
}

Json to_json(const DetectorConfig& cfg) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["parameters"] = config_to_params(cfg);
  j["beta"] = cfg.inputs[0].beta;
  j["alarm_threshold"] = cfg.alarm_threshold;
  j["debounce"] = cfg.debounce;
  j["rulebase"] = {{"max_fault_order", cfg.rulebase.max_fault_order},
                   {"mode", std::string(inference_name(cfg.rulebase.mode))}};
  return j;
}

DetectorConfig detector_from_json(const Json& j) {
  ObjectReader r(j, "detector");
  r.schema();
  const Json& params = r.at("parameters");
  if (!params.is_array() || params.size() != kParameterCount) {
    ObjectReader::fail("detector.parameters", "expected an array of 48 numbers");
  }
  std::vector<double> x;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].is_number()) {
      ObjectReader::fail("detector.parameters[" + std::to_string(i) + "]",
                         "expected a number");
    }
    x.push_back(params[i].get<double>());
  }

  DetectorConfig base;
  const double beta = r.number("beta", kDefaultBeta);
  for (InputPartition& p : base.inputs) p.beta = beta;
  base.alarm_threshold = r.number("alarm_threshold", base.alarm_threshold);
  base.debounce = r.integer("debounce", base.debounce);
  int order = base.rulebase.max_fault_order;
  InferenceMode mode = base.rulebase.mode;
  if (r.has("rulebase")) {
    ObjectReader rr(j.at("rulebase"), "detector.rulebase");
    order = rr.integer("max_fault_order", order);
    mode = parse_inference(rr.string("mode", std::string(inference_name(mode))),
                           "detector.rulebase.mode");
    rr.finish();
  }
  r.finish();
  try {
    base.rulebase = build_rulebase(signature_matrix(), order, mode);
    base.validate();
    RepairedConfig rc = params_to_config(x, base);
    if (rc.repaired) {
      throw ConfigError("membership bounds are not in valid order");
    }
    return rc.config;
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("detector: ") + e.what());
  }
}

Json to_json(const PsoParams& p) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["swarm_size"] = p.swarm_size;
  j["iterations"] = p.iterations;
  j["c1"] = p.c1;
  j["c2"] = p.c2;
  j["seed"] = p.seed;
  j["bounds"] = bounds_to_json(p.bounds);
  return j;
}

PsoParams pso_from_json(const Json& j, PsoParams base) {
  ObjectReader r(j, "pso");
  r.optional_schema();
  base.swarm_size = r.integer("swarm_size", base.swarm_size);
  base.iterations = r.integer("iterations", base.iterations);
  base.c1 = r.number("c1", base.c1);
  base.c2 = r.number("c2", base.c2);
  base.seed = r.seed("seed", base.seed);
  if (r.has("bounds")) base.bounds = bounds_from_json(j.at("bounds"), "pso.bounds");
  r.finish();
  return base;
}

Json to_json(const GaParams& p) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["population"] = p.population;
  j["max_generations"] = p.max_generations;
  j["stall_generations"] = p.stall_generations;
  j["elite_count"] = p.elite_count;
  j["crossover_fraction"] = p.crossover_fraction;
  j["mutation_rate"] = p.mutation_rate;
  j["seed"] = p.seed;
  j["bounds"] = bounds_to_json(p.bounds);
  return j;
}

GaParams ga_from_json(const Json& j, GaParams base) {
  ObjectReader r(j, "ga");
  r.optional_schema();
  base.population = r.integer("population", base.population);
  base.max_generations = r.integer("max_generations", base.max_generations);
  base.stall_generations = r.integer("stall_generations", base.stall_generations);
  base.elite_count = r.integer("elite_count", base.elite_count);
  base.crossover_fraction = r.number("crossover_fraction", base.crossover_fraction);
  base.mutation_rate = r.number("mutation_rate", base.mutation_rate);
  base.seed = r.seed("seed", base.seed);
  if (r.has("bounds")) base.bounds = bounds_from_json(j.at("bounds"), "ga.bounds");
  r.finish();
  return base;
}

Json to_json(const SuiteSpec& s) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["multiplicity_weights"] = s.multiplicity_weights;
  j["magnitude"] = range_to_json(s.magnitude);
  j["amplitude_floor"] = s.amplitude_floor;
  j["onset"] = range_to_json(s.onset);
  j["duration"] = s.duration;
  j["dt"] = s.dt;
  j["noise_std_R"] = s.noise_std_R;
  j["noise_std_C"] = s.noise_std_C;
  j["mode"] = std::string(mode_name(s.mode));
  j["ramp_fraction"] = s.ramp_fraction;
  j["ramp_time"] = range_to_json(s.ramp_time);
  j["compensation_period"] = s.compensation_period;
  return j;
}

SuiteSpec suite_spec_from_json(const Json& j, SuiteSpec base) {
  ObjectReader r(j, "suite_spec");
  r.optional_schema();
  if (r.has("multiplicity_weights")) {
    const Json& w = j.at("multiplicity_weights");
    if (!w.is_array()) ObjectReader::fail("suite_spec.multiplicity_weights", "expected an array");
    base.multiplicity_weights.clear();
    for (const Json& x : w) {
      if (!x.is_number()) {
        ObjectReader::fail("suite_spec.multiplicity_weights", "expected numbers");
      }
      base.multiplicity_weights.push_back(x.get<double>());
    }
  }
  if (r.has("magnitude")) base.magnitude = range_from_json(j.at("magnitude"), r.field("magnitude"));
  base.amplitude_floor = r.number("amplitude_floor", base.amplitude_floor);
  if (r.has("onset")) base.onset = range_from_json(j.at("onset"), r.field("onset"));
  base.duration = r.number("duration", base.duration);
  base.dt = r.number("dt", base.dt);
  base.noise_std_R = r.number("noise_std_R", base.noise_std_R);
  base.noise_std_C = r.number("noise_std_C", base.noise_std_C);
  base.mode = parse_mode(r.string("mode", std::string(mode_name(base.mode))), r.field("mode"));
  base.ramp_fraction = r.number("ramp_fraction", base.ramp_fraction);
  if (r.has("ramp_time")) base.ramp_time = range_from_json(j.at("ramp_time"), r.field("ramp_time"));
  base.compensation_period = r.integer("compensation_period", base.compensation_period);
  r.finish();
  return base;
}

Json to_json(const DetectionReport& r) {
  Json j;
  j["scenario_id"] = r.scenario_id;
  j["injected"] = set_to_json(r.injected);
  j["flagged"] = variable_map(r.first_flag);
  j["classification"] = std::string(classification_name(r.classification));
  j["delays"] = variable_map(r.delays);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string trace_csv(const Trace& trace) {
  std::string out = "t,Msf1,Msf2,De1,De2,De3,Df1,Df2\n";
  for (const MeasurementFrame& f : trace) {
    out += format_double(f.t);
    for (double v : f.values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string residual_csv(const ResidualTrace& residuals) {
  std::string out = "t,r1,r2,r3,r4,r5\n";
  for (const ResidualVector& r : residuals) {
    out += format_double(r.t);
    for (double v : r.r) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::string out = "iteration,best_fitness,mean_fitness\n";
  for (const HistoryRow& h : history) {
    out += std::to_string(h.iteration) + ',' + format_double(h.best_fitness) + ',' +
           format_double(h.mean_fitness) + '\n';
  }
  return out;
}

std::string reports_jsonl(const std::vector<DetectionReport>& reports) {
  std::string out;
  for (const DetectionReport& r : reports) out += to_json(r).dump() + '\n';
  return out;
}

}  // namespace fdi
