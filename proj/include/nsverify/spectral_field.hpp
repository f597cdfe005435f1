#pragma once

// Divergence-free truncated Fourier fields on a periodic box.
//
// Convention (every norm and certificate number depends on it):
//
//     u(x) = sum_k  u_k exp(i kt . x),    kt = 2 pi (k1/L1, k2/L2, k3/L3),
//
// with integer wave vectors k != 0 and u_{-k} = conj(u_k).  The Stokes
// eigenvalue of mode k is lambda_k = |kt|^2, and
//
//     ||u||_m^2 = |A^{m/2} u|^2 = vol(Q) * sum_k lambda_k^m |u_k|^2,
//
// the sum running over all k (both members of each +-k pair).  Only one
// representative of each pair is stored: the one whose last nonzero
// component is positive.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace nsverify {

using WaveVector = std::array<int, 3>;
using Vec3 = std::array<double, 3>;
using Vec3c = std::array<std::complex<double>, 3>;

struct DomainSpec {
  std::array<double, 3> periods{2.0 * std::numbers::pi, 2.0 * std::numbers::pi,
                                2.0 * std::numbers::pi};

  void validate() const;
  double volume() const { return periods[0] * periods[1] * periods[2]; }
  /// Physical wave vector kt of integer index k.
  Vec3 wavenumber(const WaveVector& k) const;
  /// Stokes eigenvalue |kt|^2.
  double eigenvalue(const WaveVector& k) const;

  bool operator==(const DomainSpec&) const = default;
};

/// True when k is the stored member of its +-k pair.
bool is_representative(const WaveVector& k);

/// The ordered set of stored modes 0 < lambda_k <= cutoff on a domain.
/// Modes are sorted by eigenvalue (ties broken lexicographically on k), so
/// every spectral projection onto lambda <= c is a prefix of the list.
class ModeSet {
 public:
  struct Lookup {
    std::size_t index;
    bool conjugate;  // k is the negative of the stored representative
  };

  /// Shared, cached instance for (domain, cutoff).
  static std::shared_ptr<const ModeSet> make(const DomainSpec& domain,
                                             double cutoff);

  const DomainSpec& domain() const { return domain_; }
  double cutoff() const { return cutoff_; }
  std::size_t size() const { return modes_.size(); }
  std::span<const WaveVector> modes() const { return modes_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  /// Largest |k_i| present along each axis.
  const std::array<int, 3>& max_index() const { return max_index_; }

  std::optional<Lookup> find(const WaveVector& k) const;
  /// Number of stored modes with lambda <= cutoff (a prefix length).
  std::size_t prefix_length(double cutoff) const;

  bool same_as(const ModeSet& other) const {
    return domain_ == other.domain_ && cutoff_ == other.cutoff_;
  }

  ModeSet(const DomainSpec& domain, double cutoff);

 private:
  std::size_t slot(const WaveVector& k) const;

  DomainSpec domain_;
  double cutoff_;
  std::vector<WaveVector> modes_;
  std::vector<double> eigenvalues_;
  std::array<int, 3> max_index_{0, 0, 0};
  std::vector<std::ptrdiff_t> table_;  // dense (2K+1)^3 lookup; -1 = absent
};

using ModeSetPtr = std::shared_ptr<const ModeSet>;

class SpectralVelocityField {
 public:
  /// Zero field on the given mode set.
  explicit SpectralVelocityField(ModeSetPtr modes);
  /// Field from representative coefficients (one per stored mode, in mode
  /// set order).  Throws InputError if any mode violates incompressibility
  /// |kt . u_k| <= 1e-12 |u_k| or a coefficient is not finite.
  SpectralVelocityField(ModeSetPtr modes, std::vector<Vec3c> coeffs);

  static SpectralVelocityField zero(const DomainSpec& domain, double cutoff);

  const ModeSet& modes() const { return *modes_; }
  const ModeSetPtr& mode_set() const { return modes_; }
  const DomainSpec& domain() const { return modes_->domain(); }
  double cutoff() const { return modes_->cutoff(); }
  std::span<const Vec3c> coefficients() const { return coeffs_; }

  /// Coefficient of an arbitrary wave vector (zero when not stored).
  Vec3c coefficient(const WaveVector& k) const;
  /// Largest |kt . u_k| / |u_k| over nonzero stored modes.
  double max_divergence_ratio() const;
  bool is_zero() const;

  friend SpectralVelocityField operator+(const SpectralVelocityField& a,
                                         const SpectralVelocityField& b);
  friend SpectralVelocityField operator-(const SpectralVelocityField& a,
                                         const SpectralVelocityField& b);
  friend SpectralVelocityField operator*(double s, const SpectralVelocityField& a);
  friend SpectralVelocityField operator-(const SpectralVelocityField& a);

  struct unchecked_t {};
  /// Skips the incompressibility check; for kernels whose output is
  /// divergence-free by construction.
  SpectralVelocityField(unchecked_t, ModeSetPtr modes, std::vector<Vec3c> coeffs);

 private:
  ModeSetPtr modes_;
  std::vector<Vec3c> coeffs_;
};

/// One raw (not necessarily solenoidal) Fourier coefficient.
struct RawMode {
  WaveVector k;
  Vec3c value;
};

/// Leray projection of raw coefficients.  Entries may list either or both
/// members of a +-k pair; a missing partner is implied by reality.  Listed
/// partners must be conjugate (relative tolerance 1e-12).  The k = 0 mode
/// is dropped; a mode with lambda_k > cutoff or a duplicate entry is an
/// InputError.
SpectralVelocityField leray_project(std::span<const RawMode> raw,
                                    const DomainSpec& domain, double cutoff);

/// Projects one raw coefficient onto the plane orthogonal to kt.
Vec3c leray_project_mode(const Vec3& kt, const Vec3c& value);

/// A u (multiplication by lambda_k).
SpectralVelocityField stokes_apply(const SpectralVelocityField& u);
/// A^s u (multiplication by lambda_k^s).
SpectralVelocityField stokes_power(const SpectralVelocityField& u, double s);

/// ||u||_m = |A^{m/2} u|; m = 0, 1, 2 give |u|, |Du|, |Au|.
double sobolev_norm(const SpectralVelocityField& u, double m);

/// L2 inner product (u, v) over the box.
double inner_product(const SpectralVelocityField& u, const SpectralVelocityField& v);

/// P u: keeps modes with lambda_k <= cutoff (mode set unchanged).
SpectralVelocityField galerkin_project(const SpectralVelocityField& u, double cutoff);
/// Q u = u - P u.
SpectralVelocityField tail_project(const SpectralVelocityField& u, double cutoff);

/// Largest eigenvalue shell whose real basis dimension (4 per stored mode:
/// two polarizations times cos/sin) does not exceed n_modes.  Returns 0 when
/// even the first shell does not fit.
double cutoff_for_mode_count(const DomainSpec& domain, std::size_t n_modes);
/// Real basis dimension of the modes with lambda <= cutoff.
std::size_t real_mode_count(const DomainSpec& domain, double cutoff);

/// Moves u onto the mode set with the given cutoff, dropping modes above it.
SpectralVelocityField with_cutoff(const SpectralVelocityField& u, double cutoff);

/// Cutoff containing every mode of a product of fields with cutoffs a, b.
double product_cutoff(double a, double b);

/// B(u, v) = Pi (u . grad) v on the modes lambda <= out_cutoff, computed
/// alias-free by zero-padded transforms.  Throws InputError on domain
/// mismatch.
SpectralVelocityField nonlinear_term(const SpectralVelocityField& u,
                                     const SpectralVelocityField& v,
                                     double out_cutoff);
/// B(u, v) on its full (exact) support.
SpectralVelocityField nonlinear_term(const SpectralVelocityField& u,
                                     const SpectralVelocityField& v);

/// b(u, v, w) = ((u . grad) v, w).
double trilinear_form(const SpectralVelocityField& u, const SpectralVelocityField& v,
                      const SpectralVelocityField& w);
/// (B(u, v), A w).
double trilinear_with_stokes(const SpectralVelocityField& u,
                             const SpectralVelocityField& v,
                             const SpectralVelocityField& w);

/// Point value u(x) by direct summation.
Vec3 evaluate(const SpectralVelocityField& u, const Vec3& x);

}  // namespace nsverify
