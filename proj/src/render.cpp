#include "fdi/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fdi/format.hpp"

namespace fdi {

Rgb color_rgb(double degree) {
  const double d = std::isnan(degree) ? 0.0 : std::clamp(degree, 0.0, 1.0);
  const double hue = 120.0 * (1.0 - d);
  // HSV to RGB with s = v = 1; only the red-to-green sextants are reached.
  const double x = 1.0 - std::abs(std::fmod(hue / 60.0, 2.0) - 1.0);
  double r = 0.0, g = 0.0;
  if (hue < 60.0) {
    r = 1.0;
    g = x;
  } else {
    r = x;
    g = 1.0;
  }
  auto channel = [](double f) { return static_cast<int>(std::lround(255.0 * f)); };
  return {channel(r), channel(g), 0};
}

std::string color_index(double degree) {
  const Rgb c = color_rgb(degree);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

CausalGraph CausalGraph::three_tank() {
  using V = Variable;
  return {{{V::Msf1, V::De1},
           {V::De1, V::Df1},
           {V::Df1, V::De1},
           {V::Df1, V::De2},
           {V::De2, V::Df2},
           {V::Df2, V::De2},
           {V::Df2, V::De3},
           {V::Msf2, V::De3}}};
}

std::string emit_dot(const CausalGraph& graph, const Degrees& degrees) {
  std::string out = "digraph causal {\n  node [shape=ellipse, style=filled];\n";
  for (Variable v : kAllVariables) {
    const double d = degrees[index(v)];
    const std::string name(variable_name(v));
    out += "  " + name + " [label=\"" + name + " (" + format_fixed(d, 2) +
           ")\", fillcolor=\"" + color_index(d) + "\"];\n";
  }
  std::vector<std::pair<Variable, Variable>> edges = graph.edges;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& [from, to] : edges) {
    out += "  " + std::string(variable_name(from)) + " -> " + std::string(variable_name(to)) +
           ";\n";
  }
  out += "}\n";
  return out;
}

std::string emit_ansi(const Degrees& degrees, bool color) {
  std::string out;
  for (Variable v : kAllVariables) {
    const double d = degrees[index(v)];
    std::string name(variable_name(v));
    name.resize(5, ' ');
    const std::string text = name + ' ' + format_fixed(d, 2);
    if (color) {
      const Rgb c = color_rgb(d);
      out += "\x1b[48;2;" + std::to_string(c.r) + ';' + std::to_string(c.g) + ';' +
             std::to_string(c.b) + "m\x1b[30m " + text + " \x1b[0m\n";
    } else {
      out += text + '\n';
    }
  }
  return out;
}

}  // namespace fdi
