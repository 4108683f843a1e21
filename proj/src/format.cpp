#include "fdi/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace fdi {

namespace {

std::string non_finite(double x) {
  if (std::isnan(x)) return "nan";
  return x < 0 ? "-inf" : "inf";
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return non_finite(x);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double x, int digits) {
  if (!std::isfinite(x)) return non_finite(x);
  char buf[128];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

}  // namespace fdi
