#pragma once

// Empirical checks of the trilinear-form inequalities
//
//   |(B(u,v), Aw)|     <= k  |Du| |Dv|^{1/2} |Av|^{1/2} |Aw|
//   |(B(w,u), A^2 w)|  <= c  ||u||_3 ||w||_2^2
//   |(B(u,w), A^2 w)|  <= c' ||u||_3 ||w||_2^2
//   ||B(u,u)||_2       <= c  ||u||_2 ||u||_3
//
// and the table of constants the certificates use.  Observed ratios are
// lower bounds on the sharp constants, nothing more.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nsverify/spectral_field.hpp"

namespace nsverify::lab {

/// Sobolev L6 constant of the cube.
inline const double kDefaultSobolev = 4.0 * std::numbers::sqrt2;

struct ConstantTable {
  double c_s = kDefaultSobolev;
  /// 9 c_s^{3/2}; equals 72 * 2^{3/4} for the default c_s.
  double k_tri = 9.0 * std::pow(kDefaultSobolev, 1.5);
  /// Constants c and c' of the second-order inequalities.  No numerical
  /// values are known; second-order certificates refuse to run without them.
  std::optional<double> c_b;
  std::optional<double> c_b_prime;

  static ConstantTable from_sobolev(double c_s);
  /// Throws InputError on a non-positive entry.
  void validate() const;
};

double ratio_triform1(const SpectralVelocityField& u, const SpectralVelocityField& v,
                      const SpectralVelocityField& w);

enum class SecondOrderForm { wu, uw };

/// |(B(w,u), A^2 w)| (wu) or |(B(u,w), A^2 w)| (uw) over ||u||_3 ||w||_2^2.
double ratio_triform2(const SpectralVelocityField& u, const SpectralVelocityField& w,
                      SecondOrderForm form);

double ratio_b_v2(const SpectralVelocityField& u);

struct SamplerSpec {
  std::size_t sample_count = 0;
  DomainSpec domain{};
  double cutoff = 16.0;
  double decay_exponent = 2.0;
  std::uint64_t seed = 0;
};

struct EstimateReport {
  SamplerSpec spec;
  std::optional<double> max_triform1;
  std::optional<double> max_triform2_wu;
  std::optional<double> max_triform2_uw;
  std::optional<double> max_b_v2;
  /// Configured constants that lie below an observed ratio.
  std::vector<std::string> flags;
};

/// Sample u, v, w independently (substreams 3s, 3s+1, 3s+2 of the seed) and
/// record the maximal ratio of each inequality.
EstimateReport estimate_constants(const SamplerSpec& spec, const ConstantTable& constants);

/// Structured (JSON) rendering of a report.
std::string to_json(const EstimateReport& report, const ConstantTable& constants);

}  // namespace nsverify::lab
