#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fdi/variables.hpp"

namespace fdi {

using Degrees = std::array<double, kVariableCount>;

struct Rgb {
  int r{0}, g{0}, b{0};
  bool operator==(const Rgb&) const = default;
};

// Hue runs linearly from 120 degrees (green) at 0 to 0 degrees (red) at 1,
// full saturation and value. Degrees outside [0, 1] are clamped.
Rgb color_rgb(double degree);

// "#RRGGBB" of color_rgb.
std::string color_index(double degree);

struct CausalGraph {
  std::vector<std::pair<Variable, Variable>> edges;

  // Influence edges following the coupling structure of the relations.
  static CausalGraph three_tank();
};

// Byte-stable DOT digraph: nodes in variable order, edges sorted.
std::string emit_dot(const CausalGraph& graph, const Degrees& degrees);

// One line per variable in fixed order; 24-bit background escapes unless
// `color` is false.
std::string emit_ansi(const Degrees& degrees, bool color = true);

}  // namespace fdi
