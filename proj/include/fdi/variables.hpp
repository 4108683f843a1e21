#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace fdi {

inline constexpr std::size_t kVariableCount = 7;
inline constexpr std::size_t kArrCount = 5;

// The seven supervised variables of the three-tank process, in the fixed
// order used by measurement frames, signature rows, output partitions and
// the parameter genome.
enum class Variable : std::size_t { Msf1, Msf2, De1, De2, De3, Df1, Df2 };

inline constexpr std::array<Variable, kVariableCount> kAllVariables = {
    Variable::Msf1, Variable::Msf2, Variable::De1, Variable::De2,
    Variable::De3,  Variable::Df1,  Variable::Df2};

constexpr std::size_t index(Variable v) { return static_cast<std::size_t>(v); }

std::string_view variable_name(Variable v);
std::optional<Variable> parse_variable(std::string_view name);

using VariableSet = std::bitset<kVariableCount>;

// "{De2,Msf2}" in variable order; "{}" when empty.
std::string format_set(const VariableSet& set);

}  // namespace fdi
