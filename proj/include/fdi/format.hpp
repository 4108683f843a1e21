#pragma once

#include <string>

namespace fdi {

// Shortest text that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_double(double x);

// Fixed notation with `digits` decimals.
std::string format_fixed(double x, int digits);

}  // namespace fdi
