#include "nsverify/quadrature.hpp"

#include <algorithm>
#include <string>

#include "nsverify/errors.hpp"

namespace nsverify {

std::string_view to_string(QuadratureMode mode) {
  return mode == QuadratureMode::trapezoid ? "trapezoid" : "conservative";
}

QuadratureMode parse_quadrature_mode(std::string_view text) {
  if (text == "trapezoid") return QuadratureMode::trapezoid;
  if (text == "conservative") return QuadratureMode::conservative;
  throw InputError("unknown quadrature mode '" + std::string(text) +
                   "' (expected trapezoid or conservative)");
}

double integrate_samples(std::span<const double> times,
                         std::span<const double> values, QuadratureMode mode) {
  if (times.size() != values.size())
    throw InputError("quadrature: times and values differ in length");
  if (times.empty()) throw InputError("quadrature: no samples");
  double total = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = times[i] - times[i - 1];
    if (!(h > 0.0)) throw InputError("quadrature: sample times not strictly increasing");
    if (mode == QuadratureMode::trapezoid)
      total += 0.5 * h * (values[i - 1] + values[i]);
    else
      total += h * std::max(values[i - 1], values[i]);
  }
  return total;
}

}  // namespace nsverify
