#pragma once

#include <cstdint>

#include "nsverify/spectral_field.hpp"

namespace nsverify {

/// u = a (cos X sin Y, -sin X cos Y, 0) with X = 2 pi x / L1, Y = 2 pi y / L2.
/// Stored on the mode set with the given cutoff (must reach the X-Y shell).
SpectralVelocityField taylor_green(const DomainSpec& domain, double cutoff,
                                   double amplitude = 1.0);

/// Single conjugate pair: u_k = a p (Leray-projected), u_{-k} = conj(u_k),
/// i.e. u(x) = 2 a Re(p e^{i kt.x}) when p is transverse.
SpectralVelocityField single_mode(const DomainSpec& domain, double cutoff,
                                  const WaveVector& k, const Vec3c& polarization,
                                  double amplitude = 1.0);

struct RandomFieldSpec {
  double cutoff = 16.0;
  /// Coefficients are complex Gaussians scaled by lambda_k^{-decay_exponent}.
  double decay_exponent = 2.0;
  double amplitude = 1.0;
};

/// Seeded random divergence-free field: independent standard complex
/// Gaussian components per stored mode, scaled by amplitude * lambda^-p and
/// Leray-projected.  Same seed, same field.
SpectralVelocityField random_divergence_free(const DomainSpec& domain,
                                             const RandomFieldSpec& spec,
                                             std::uint64_t seed);

/// Deterministic independent substream seed (splitmix64 of seed and index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace nsverify
