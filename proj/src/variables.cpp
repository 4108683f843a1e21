#include "fdi/variables.hpp"

#include "fdi/errors.hpp"

namespace fdi {

namespace {
constexpr std::array<std::string_view, kVariableCount> kNames = {
    "Msf1", "Msf2", "De1", "De2", "De3", "Df1", "Df2"};
}

std::string_view variable_name(Variable v) { return kNames[index(v)]; }

std::optional<Variable> parse_variable(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllVariables[i];
  }
  return std::nullopt;
}

std::string format_set(const VariableSet& set) {
  std::string out = "{";
  bool first = true;
  for (Variable v : kAllVariables) {
    if (!set.test(index(v))) continue;
    if (!first) out += ',';
    out += variable_name(v);
    first = false;
  }
  out += '}';
  return out;
}

SimulationDiverged::SimulationDiverged(std::string variable, double time,
                                       const std::string& context)
    : Error((context.empty() ? std::string() : context + ": ") +
            "simulation diverged: " + variable + " became non-finite at t=" +
            std::to_string(time)),
      variable_(std::move(variable)),
      time_(time) {}

}  // namespace fdi
