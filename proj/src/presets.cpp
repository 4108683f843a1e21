#include "fdi/presets.hpp"

namespace fdi::presets {

const std::vector<double>& pso_reference_params() {
  static const std::vector<double> kParams = {
      // ARR1..ARR5: a_i1, a_i2, a_i3, a_i4
      0.146, 0.973, 1.57, 1.73,
      0.516, 1.343, 1.944, 2.24,
      0.225, 1.057, 1.657, 1.957,
      0.49, 1.32, 1.92, 2.42,
      0.225, 1.05, 1.468, 1.87,
      // Msf1, Msf2, De1, De2, De3, Df1, Df2: a_j, b_j, c_j, d_j
      -0.754, -0.304, 0.304, 0.6746,
      -0.622, -0.172, 0.383, 0.674,
      -0.621, -0.357, 0.251, 0.595,
      -0.701, -0.304, 0.304, 0.675,
      -0.674, -0.357, 0.251, 0.542,
      -0.463, -0.146, 0.462, 0.753,
      -0.621, -0.3305, 0.2275, 0.595,
  };
  return kParams;
}

const std::vector<double>& ga_reference_params() {
  static const std::vector<double> kParams = {
      0.106, 0.93, 1.07, 1.73,
      0.436, 1.403, 1.84, 2.42,
      0.325, 1.07, 1.67, 1.786,
      0.409, 1.29, 1.928, 2.53,
      0.325, 1.214, 1.68, 1.87,
      -0.754, -0.42, 0.2019, 0.7146,
      -0.628, -0.189, 0.283, 0.474,
      -0.528, -0.343, 0.154, 0.498,
      -0.721, -0.2021, 0.398, 0.668,
      -0.654, -0.326, 0.281, 0.526,
      -0.429, -0.257, 0.392, 0.543,
      -0.671, -0.2105, 0.3275, 0.492,
  };
  return kParams;
}

DetectorConfig pso_reference() {
  return params_to_config(pso_reference_params()).config;
}

DetectorConfig ga_reference() {
  return params_to_config(ga_reference_params()).config;
}

DetectorConfig detuned() {
  std::vector<double> x;
  for (std::size_t i = 0; i < kArrCount; ++i) x.insert(x.end(), {0.95, 1.5, 4.0, 5.0});
  for (std::size_t j = 0; j < kVariableCount; ++j) x.insert(x.end(), {-0.6, -0.5, 4.5, 5.0});
  return params_to_config(x).config;
}

std::optional<DetectorConfig> by_name(std::string_view name) {
  if (name == "pso-reference") return pso_reference();
  if (name == "ga-reference") return ga_reference();
  if (name == "detuned") return detuned();
  return std::nullopt;
}

}  // namespace fdi::presets
