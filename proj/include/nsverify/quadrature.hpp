#pragma once

#include <span>
#include <string_view>

namespace nsverify {

/// How sampled integrands are integrated in time.
///
/// `trapezoid` is the composite trapezoid rule on the sample grid.
/// `conservative` takes, on every interval, the larger of the two endpoint
/// values (an upper Riemann sum of the piecewise-linear interpolant), so the
/// integral is never under-estimated relative to the trapezoid value.
enum class QuadratureMode { trapezoid, conservative };

std::string_view to_string(QuadratureMode mode);
QuadratureMode parse_quadrature_mode(std::string_view text);

/// Integrates samples `values[i]` taken at strictly increasing `times[i]`.
/// Throws InputError on size mismatch, fewer than one sample, or a
/// non-increasing time grid.
double integrate_samples(std::span<const double> times,
                         std::span<const double> values, QuadratureMode mode);

}  // namespace nsverify
