#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "fdi/fuzzy.hpp"

namespace fdi::presets {

// Reference PSO-tuned membership bounds, in genome order.
const std::vector<double>& pso_reference_params();
// Reference GA-tuned membership bounds, in genome order.
const std::vector<double>& ga_reference_params();

DetectorConfig pso_reference();
DetectorConfig ga_reference();

// Valid but deliberately poor detector: a wide Z core swallows moderate
// faults and flat OK plateaus pull partial activations toward OK.
DetectorConfig detuned();

// "pso-reference", "ga-reference", "detuned".
std::optional<DetectorConfig> by_name(std::string_view name);

}  // namespace fdi::presets
