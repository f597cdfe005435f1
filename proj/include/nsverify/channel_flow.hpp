#pragma once

// Channel 0 < x < Lx, 0 < y < 1, 0 < z < Lz, periodic in x and z, no-slip
// at the walls, in the basis
//
//     w_k = exp(2 pi i (k1 x / Lx + k3 z / Lz)) sin(pi k2 y),
//     u_n = sum_k alpha_k w_k,  -n <= k1, k3 <= n,  0 <= k2 <= n.
//
// Two independent evaluations of every quantity are kept side by side:
//
//  * the oracle: fields are evaluated on a tensor grid (uniform in x and z,
//    Gauss-Legendre in y), differentiated analytically, multiplied pointwise
//    and projected back onto w_k by quadrature.  This is the ground truth.
//  * the closed-form expansions (k-hat vector, divergence relation, triple
//    sum for B, norm sums), evaluated term by term as written.  Several of them
//    disagree with the oracle; the disagreement is reported, not repaired.
//
// "Divergence-constrained" projection: a finite sum of w_k is exactly
// divergence-free iff alpha_2k = 0 for all k and k1 alpha_1 / Lx + k3 alpha_3
// / Lz = 0 per mode (the cos(pi k2 y) terms cannot cancel against sines).
// project_divergence_free is the L2-orthogonal projection onto that set.

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsverify/galerkin_solver.hpp"

namespace nsverify::channel {

using Complex = std::complex<double>;
using Vec3c = std::array<Complex, 3>;
using Index3 = std::array<int, 3>;

struct ChannelDomain {
  double Lx = 1.0;
  double Lz = 1.0;

  void validate() const;
};

/// alpha_k for -n <= k1, k3 <= n, 0 <= k2 <= n (dense storage).
class ChannelCoefficients {
 public:
  explicit ChannelCoefficients(int n = 0);

  int n() const { return n_; }
  bool in_range(const Index3& k) const;
  /// Zero outside the index range.
  Vec3c at(const Index3& k) const;
  void set(const Index3& k, const Vec3c& value);
  /// Sets alpha_k and its partner alpha_(-k1, k2, -k3) = conj(alpha_k).
  void set_with_partner(const Index3& k, const Vec3c& value);

  /// All indices, k1 slowest, k3 fastest.
  std::vector<Index3> indices() const;
  /// max_k |alpha_(-k1,k2,-k3) - conj(alpha_k)|.
  double reality_error() const;
  bool is_zero() const;

  ChannelCoefficients operator+(const ChannelCoefficients& o) const;
  ChannelCoefficients operator-(const ChannelCoefficients& o) const;
  friend ChannelCoefficients operator*(double s, const ChannelCoefficients& c);

 private:
  std::size_t offset(const Index3& k) const;
  int n_;
  std::vector<Vec3c> data_;
};

/// w_k at (x, y, z).
Complex basis_eval(const Index3& k, double x, double y, double z, const ChannelDomain& domain);

/// Grid resolution of the oracle.  `oversample` multiplies the number of
/// modes per direction of the finest expansion involved (2n for products).
struct OracleGrid {
  int oversample = 8;
};

// ---------------------------------------------------------------- divergence

struct DivergenceReport {
  double oracle = 0.0;    // || div u ||_{L2} by quadrature
  double verbatim = 0.0;  // l2 norm of the closed-form per-mode relation
};

DivergenceReport divergence_residual(const ChannelCoefficients& c, const ChannelDomain& domain,
                                     OracleGrid grid = {});

/// Exactly divergence-free part (see the header comment).
ChannelCoefficients project_divergence_free(const ChannelCoefficients& c,
                                            const ChannelDomain& domain);

/// The closed-form k-hat vector for index k with truncation n.  Its second entry
/// is the l-sum of the divergence relation.
Vec3c k_hat(const Index3& k, int n, const ChannelDomain& domain);

// ------------------------------------------------------------------- Stokes

/// Per-mode factor 4 pi^2 (k1^2/Lx^2 + k2^2/4 + k3^2/Lz^2).
double stokes_factor(const Index3& k, const ChannelDomain& domain);
ChannelCoefficients stokes_channel(const ChannelCoefficients& c, const ChannelDomain& domain);
/// -Laplacian by quadrature projection (oracle counterpart).
ChannelCoefficients stokes_channel_oracle(const ChannelCoefficients& c,
                                          const ChannelDomain& domain, OracleGrid grid = {});

// ---------------------------------------------------------------- nonlinear

struct ModeDiscrepancy {
  Index3 k{};
  double oracle_abs = 0.0;
  double verbatim_abs = 0.0;
  double diff_abs = 0.0;  // |oracle - verbatim| (vector 2-norm)
};

struct NonlinearComparison {
  ChannelCoefficients oracle;    // over the 2n index range
  ChannelCoefficients verbatim;  // over the 2n index range
  std::vector<ModeDiscrepancy> table;  // modes where either side is nonzero
  double max_diff = 0.0;
};

/// Projected (u . grad) u by quadrature, onto the 2n index range.
ChannelCoefficients nonlinear_channel_oracle(const ChannelCoefficients& c,
                                             const ChannelDomain& domain, OracleGrid grid = {});
/// The closed-form triple sum, read literally.  Throws InputError for n > 4.
ChannelCoefficients nonlinear_channel_verbatim(const ChannelCoefficients& c,
                                               const ChannelDomain& domain);
NonlinearComparison nonlinear_channel(const ChannelCoefficients& c, const ChannelDomain& domain,
                                      OracleGrid grid = {});

// -------------------------------------------------------------------- norms

struct ChannelNorms {
  double du_oracle = 0.0;    // || grad u ||_{L2}
  double au_oracle = 0.0;    // || Laplacian u ||_{L2}
  double du_verbatim = 0.0;  // sqrt(2 Lx Lz sum |alpha|^2 |khat1 + khat2 + khat3|^2)
  double au_verbatim = 0.0;  // sqrt(2 pi^2 Lx Lz sum |alpha|^2 (...)^2)
  double l2_oracle = 0.0;    // || u ||_{L2}
  double max_imag_ratio = 0.0;  // largest |Im| / |value| seen on the grid
};

ChannelNorms channel_norms(const ChannelCoefficients& c, const ChannelDomain& domain,
                           OracleGrid grid = {});

// ------------------------------------------------------------------ forcing

/// Sine expansion of (1, 0, 1) up to k2 = n: b = 4 / (pi k2) for odd k2.
ChannelCoefficients channel_forcing(int n);

// ----------------------------------------------------------- certificates

struct ChannelSample {
  double t = 0.0;
  ChannelCoefficients alpha;
  std::optional<ChannelCoefficients> dalpha_dt;
};

enum class ChannelEvaluation { oracle, verbatim };

/// Norm series for the minimal certificate: du, au and r_v1 = ||E_n||_1 with
/// E_n = du/dt + nu A u + B(u, u) - (1, 0, 1).  The constant body force has
/// zero gradient, so ||E_n||_1 depends on the w_k part only.  u_l2 is filled
/// in oracle mode; u_v3 and r_v2 are left at zero.  Throws InputError when a
/// sample lacks dalpha_dt or the times do not increase.
Trajectory channel_certificate_inputs(const std::vector<ChannelSample>& samples,
                                      const ChannelDomain& domain, double nu,
                                      ChannelEvaluation mode = ChannelEvaluation::oracle,
                                      OracleGrid grid = {});

// ------------------------------------------------------------------ helpers

/// Seeded random coefficients (Gaussian, amplitude (1 + |k|^2)^(-decay/2)),
/// real-valued field, projected onto the divergence-free set.
ChannelCoefficients random_channel_coefficients(int n, const ChannelDomain& domain,
                                                std::uint64_t seed, double decay = 2.0);

/// Text format: "nsverify-channel 1", "domain Lx Lz", "n N", "modes M", then
/// M records "k1 k2 k3 re1 im1 re2 im2 re3 im3".
void write_channel(std::ostream& out, const ChannelCoefficients& c, const ChannelDomain& domain);
std::pair<ChannelCoefficients, ChannelDomain> read_channel(std::istream& in);

std::string discrepancy_csv(const std::vector<ModeDiscrepancy>& table);

}  // namespace nsverify::channel
