#include "nsverify/field_presets.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "nsverify/errors.hpp"

namespace nsverify {

SpectralVelocityField taylor_green(const DomainSpec& domain, double cutoff, double amplitude) {
  // cos X sin Y = (1/4i)[e^{i(X+Y)} - e^{i(X-Y)} + e^{i(-X+Y)} - e^{-i(X+Y)}]
  // -sin X cos Y = -(1/4i)[e^{i(X+Y)} + e^{i(X-Y)} - e^{i(-X+Y)} - e^{-i(X+Y)}]
  const std::complex<double> q(0.0, -0.25 * amplitude);  // 1/(4i)
  const std::vector<RawMode> raw{
      {{1, 1, 0}, {q, -q, 0.0}},
      {{1, -1, 0}, {-q, -q, 0.0}},
      {{-1, 1, 0}, {q, q, 0.0}},
      {{-1, -1, 0}, {-q, q, 0.0}},
  };
  return leray_project(raw, domain, cutoff);
}

SpectralVelocityField single_mode(const DomainSpec& domain, double cutoff, const WaveVector& k,
                                  const Vec3c& polarization, double amplitude) {
  if (k == WaveVector{0, 0, 0}) throw InputError("single mode needs a nonzero wave vector");
  const Vec3c value{amplitude * polarization[0], amplitude * polarization[1],
                    amplitude * polarization[2]};
  const std::vector<RawMode> raw{{k, value}};
  return leray_project(raw, domain, cutoff);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SpectralVelocityField random_divergence_free(const DomainSpec& domain,
                                             const RandomFieldSpec& spec,
                                             std::uint64_t seed) {
  auto modes = ModeSet::make(domain, spec.cutoff);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec3c> coeffs(modes->size());
  const auto wave = modes->modes();
  const auto lambda = modes->eigenvalues();
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const double scale = spec.amplitude * std::pow(lambda[i], -spec.decay_exponent);
    Vec3c raw;
    for (auto& c : raw) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      c = scale * std::complex<double>(re, im);
    }
    coeffs[i] = leray_project_mode(domain.wavenumber(wave[i]), raw);
  }
  return {SpectralVelocityField::unchecked_t{}, std::move(modes), std::move(coeffs)};
}

}  // namespace nsverify
