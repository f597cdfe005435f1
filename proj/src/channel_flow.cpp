#include "nsverify/channel_flow.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "nsverify/errors.hpp"
#include "nsverify/field_io.hpp"

namespace nsverify::channel {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I(0.0, 1.0);

double norm2(const Vec3c& v) { return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]); }

// ------------------------------------------------------------ quadrature grid

struct Grid {
  int nx = 0, ny = 0, nz = 0;
  ChannelDomain domain;
  std::vector<double> x, z, y, wy;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t at(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny + j) * nz + k;
  }
  double cell() const { return domain.Lx / nx * domain.Lz / nz; }
};

using Samples = std::vector<Complex>;

// Resolves products of two expansions of order nn and their projection onto
// order 2 nn.
Grid make_grid(int nn, const ChannelDomain& domain, const OracleGrid& spec) {
  if (spec.oversample < 1) throw InputError("oracle oversampling must be positive");
  Grid g;
  g.domain = domain;
  g.nx = g.nz = spec.oversample * (2 * std::max(nn, 1) + 1);
  g.ny = g.nx;
  for (int i = 0; i < g.nx; ++i) g.x.push_back(domain.Lx * i / g.nx);
  for (int i = 0; i < g.nz; ++i) g.z.push_back(domain.Lz * i / g.nz);
  std::unique_ptr<gsl_integration_glfixed_table, void (*)(gsl_integration_glfixed_table*)> table(
      gsl_integration_glfixed_table_alloc(g.ny), gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("Gauss-Legendre table allocation failed");
  for (int i = 0; i < g.ny; ++i) {
    double xi = 0.0, wi = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, i, &xi, &wi, table.get());
    g.y.push_back(xi);
    g.wy.push_back(wi);
  }
  return g;
}

// sum_k coeff(k) exp(2 pi i (k1 x/Lx + k3 z/Lz)) Y(pi k2 y), Y = sin or cos,
// over -nn <= k1, k3 <= nn, 0 <= k2 <= nn.  Separable: z, then x, then y.
template <class Coeff>
Samples synthesize(const Grid& g, int nn, Coeff coeff, bool cosine) {
  const int m = 2 * nn + 1;
  std::vector<Complex> ex(static_cast<std::size_t>(m) * g.nx), ez(static_cast<std::size_t>(m) * g.nz);
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i < g.nx; ++i)
      ex[a * g.nx + i] = std::exp(2.0 * pi * I * double(a - nn) * g.x[i] / g.domain.Lx);
    for (int i = 0; i < g.nz; ++i)
      ez[a * g.nz + i] = std::exp(2.0 * pi * I * double(a - nn) * g.z[i] / g.domain.Lz);
  }
  // step 1: (k1, k2, z)
  std::vector<Complex> s1(static_cast<std::size_t>(m) * (nn + 1) * g.nz);
  for (int a = 0; a < m; ++a)
    for (int k2 = 0; k2 <= nn; ++k2)
      for (int c = 0; c < m; ++c) {
        const Complex v = coeff(Index3{a - nn, k2, c - nn});
        if (v == 0.0) continue;
        Complex* row = &s1[(static_cast<std::size_t>(a) * (nn + 1) + k2) * g.nz];
        for (int iz = 0; iz < g.nz; ++iz) row[iz] += v * ez[c * g.nz + iz];
      }
  // step 2: (k2, x, z)
  std::vector<Complex> s2(static_cast<std::size_t>(nn + 1) * g.nx * g.nz);
  for (int k2 = 0; k2 <= nn; ++k2)
    for (int a = 0; a < m; ++a) {
      const Complex* src = &s1[(static_cast<std::size_t>(a) * (nn + 1) + k2) * g.nz];
      for (int ix = 0; ix < g.nx; ++ix) {
        const Complex e = ex[a * g.nx + ix];
        Complex* dst = &s2[(static_cast<std::size_t>(k2) * g.nx + ix) * g.nz];
        for (int iz = 0; iz < g.nz; ++iz) dst[iz] += e * src[iz];
      }
    }
  // step 3: (x, y, z)
  Samples out(g.size());
  for (int k2 = 0; k2 <= nn; ++k2)
    for (int iy = 0; iy < g.ny; ++iy) {
      const double yv = cosine ? std::cos(pi * k2 * g.y[iy]) : std::sin(pi * k2 * g.y[iy]);
      if (yv == 0.0) continue;
      for (int ix = 0; ix < g.nx; ++ix) {
        const Complex* src = &s2[(static_cast<std::size_t>(k2) * g.nx + ix) * g.nz];
        Complex* dst = &out[g.at(ix, iy, 0)];
        for (int iz = 0; iz < g.nz; ++iz) dst[iz] += yv * src[iz];
      }
    }
  return out;
}

// Coefficients of F against w_k: (F, w_k) / (w_k, w_k), over order nn.
std::vector<Complex> analyze(const Grid& g, const Samples& f, int nn) {
  const int m = 2 * nn + 1;
  // step 1: (k2, x, z) = int dy sin(pi k2 y) F
  std::vector<Complex> s1(static_cast<std::size_t>(nn + 1) * g.nx * g.nz);
  for (int k2 = 1; k2 <= nn; ++k2)
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iy = 0; iy < g.ny; ++iy) {
        const double w = g.wy[iy] * std::sin(pi * k2 * g.y[iy]);
        const Complex* src = &f[g.at(ix, iy, 0)];
        Complex* dst = &s1[(static_cast<std::size_t>(k2) * g.nx + ix) * g.nz];
        for (int iz = 0; iz < g.nz; ++iz) dst[iz] += w * src[iz];
      }
  // step 2: (k1, k2, z) = mean_x exp(-2 pi i k1 x / Lx) ...
  std::vector<Complex> s2(static_cast<std::size_t>(m) * (nn + 1) * g.nz);
  for (int a = 0; a < m; ++a)
    for (int ix = 0; ix < g.nx; ++ix) {
      const Complex e = std::exp(-2.0 * pi * I * double(a - nn) * g.x[ix] / g.domain.Lx) /
                        double(g.nx);
      for (int k2 = 1; k2 <= nn; ++k2) {
        const Complex* src = &s1[(static_cast<std::size_t>(k2) * g.nx + ix) * g.nz];
        Complex* dst = &s2[(static_cast<std::size_t>(a) * (nn + 1) + k2) * g.nz];
        for (int iz = 0; iz < g.nz; ++iz) dst[iz] += e * src[iz];
      }
    }
  // step 3: (k1, k2, k3); the factor 2 is 1 / int sin^2.
  std::vector<Complex> out(static_cast<std::size_t>(m) * (nn + 1) * m);
  for (int a = 0; a < m; ++a)
    for (int k2 = 1; k2 <= nn; ++k2) {
      const Complex* src = &s2[(static_cast<std::size_t>(a) * (nn + 1) + k2) * g.nz];
      for (int c = 0; c < m; ++c) {
        Complex acc = 0.0;
        for (int iz = 0; iz < g.nz; ++iz)
          acc += std::exp(-2.0 * pi * I * double(c - nn) * g.z[iz] / g.domain.Lz) * src[iz];
        out[(static_cast<std::size_t>(a) * (nn + 1) + k2) * m + c] = 2.0 * acc / double(g.nz);
      }
    }
  return out;
}

ChannelCoefficients from_analysis(const std::array<std::vector<Complex>, 3>& comps, int nn) {
  ChannelCoefficients out(nn);
  const int m = 2 * nn + 1;
  for (int a = 0; a < m; ++a)
    for (int k2 = 1; k2 <= nn; ++k2)
      for (int c = 0; c < m; ++c) {
        const std::size_t o = (static_cast<std::size_t>(a) * (nn + 1) + k2) * m + c;
        out.set({a - nn, k2, c - nn}, {comps[0][o], comps[1][o], comps[2][o]});
      }
  return out;
}

// Physical fields of u: values and first derivatives, real parts kept.
struct Physical {
  std::array<std::vector<double>, 3> u;
  std::array<std::array<std::vector<double>, 3>, 3> grad;  // grad[i][j] = d_j u_i
  double max_imag_ratio = 0.0;
};

std::vector<double> real_part(const Samples& s, double& worst) {
  // Imaginary residue relative to the field's largest magnitude.
  std::vector<double> out(s.size());
  double max_imag = 0.0, max_abs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = s[i].real();
    max_imag = std::max(max_imag, std::abs(s[i].imag()));
    max_abs = std::max(max_abs, std::abs(s[i]));
  }
  if (max_abs > 0.0) worst = std::max(worst, max_imag / max_abs);
  return out;
}

Samples derivative(const Grid& g, const ChannelCoefficients& c, int comp, int dir) {
  const auto& d = g.domain;
  if (dir == 1)
    return synthesize(g, c.n(), [&](const Index3& k) { return pi * k[1] * c.at(k)[comp]; }, true);
  const double L = dir == 0 ? d.Lx : d.Lz;
  return synthesize(
      g, c.n(), [&](const Index3& k) { return 2.0 * pi * I * double(k[dir]) / L * c.at(k)[comp]; },
      false);
}

Physical physical(const Grid& g, const ChannelCoefficients& c, bool with_values = true) {
  Physical p;
  for (int i = 0; i < 3; ++i) {
    if (with_values)
      p.u[i] = real_part(synthesize(g, c.n(), [&](const Index3& k) { return c.at(k)[i]; }, false),
                         p.max_imag_ratio);
    for (int j = 0; j < 3; ++j) p.grad[i][j] = real_part(derivative(g, c, i, j), p.max_imag_ratio);
  }
  return p;
}

double l2(const Grid& g, const std::vector<double>& f) {
  double acc = 0.0;
  for (int ix = 0; ix < g.nx; ++ix)
    for (int iy = 0; iy < g.ny; ++iy) {
      const double* row = &f[g.at(ix, iy, 0)];
      double s = 0.0;
      for (int iz = 0; iz < g.nz; ++iz) s += row[iz] * row[iz];
      acc += g.wy[iy] * s;
    }
  return acc * g.cell();
}

double gradient_norm(const Grid& g, const ChannelCoefficients& c, double* imag_ratio = nullptr) {
  const auto p = physical(g, c, false);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += l2(g, p.grad[i][j]);
  if (imag_ratio) *imag_ratio = std::max(*imag_ratio, p.max_imag_ratio);
  return std::sqrt(acc);
}

double laplacian_factor(const Index3& k, const ChannelDomain& d) {
  return 4.0 * pi * pi * (k[0] * k[0] / (d.Lx * d.Lx) + k[2] * k[2] / (d.Lz * d.Lz)) +
         pi * pi * k[1] * k[1];
}

ChannelCoefficients embed(const ChannelCoefficients& c, int n) {
  ChannelCoefficients out(n);
  for (const auto& k : c.indices())
    if (out.in_range(k)) out.set(k, c.at(k));
  return out;
}

double hat_sum(int k2, int n) {
  double s = 0.0;
  for (int l = k2 / 2; l <= (k2 + n) / 2; ++l)
    s += (2 * l + 1 - k2) * (1.0 / (2 * k2 - 2 * l - 1) + 1.0 / (2 * l + 1));
  return s;
}

Complex bilinear(const Vec3c& a, const Vec3c& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

// ------------------------------------------------------------------ types

void ChannelDomain::validate() const {
  if (!(Lx > 0.0) || !std::isfinite(Lx) || !(Lz > 0.0) || !std::isfinite(Lz))
    throw InputError("channel periods Lx, Lz must be positive");
}

ChannelCoefficients::ChannelCoefficients(int n) : n_(n) {
  if (n < 0) throw InputError("channel truncation n must be nonnegative");
  data_.assign(static_cast<std::size_t>(2 * n + 1) * (n + 1) * (2 * n + 1), Vec3c{});
}

bool ChannelCoefficients::in_range(const Index3& k) const {
  return std::abs(k[0]) <= n_ && std::abs(k[2]) <= n_ && k[1] >= 0 && k[1] <= n_;
}

std::size_t ChannelCoefficients::offset(const Index3& k) const {
  return (static_cast<std::size_t>(k[0] + n_) * (n_ + 1) + k[1]) * (2 * n_ + 1) + (k[2] + n_);
}

Vec3c ChannelCoefficients::at(const Index3& k) const {
  return in_range(k) ? data_[offset(k)] : Vec3c{};
}

void ChannelCoefficients::set(const Index3& k, const Vec3c& value) {
  if (!in_range(k)) throw InputError("channel mode index out of range");
  data_[offset(k)] = value;
}

void ChannelCoefficients::set_with_partner(const Index3& k, const Vec3c& value) {
  set(k, value);
  set({-k[0], k[1], -k[2]}, {std::conj(value[0]), std::conj(value[1]), std::conj(value[2])});
}

std::vector<Index3> ChannelCoefficients::indices() const {
  std::vector<Index3> out;
  out.reserve(data_.size());
  for (int a = -n_; a <= n_; ++a)
    for (int b = 0; b <= n_; ++b)
      for (int c = -n_; c <= n_; ++c) out.push_back({a, b, c});
  return out;
}

double ChannelCoefficients::reality_error() const {
  double worst = 0.0;
  for (const auto& k : indices()) {
    const auto a = at(k);
    const auto b = at({-k[0], k[1], -k[2]});
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(b[i] - std::conj(a[i])));
  }
  return worst;
}

bool ChannelCoefficients::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Vec3c& v) { return norm2(v) == 0.0; });
}

ChannelCoefficients ChannelCoefficients::operator+(const ChannelCoefficients& o) const {
  const int n = std::max(n_, o.n_);
  ChannelCoefficients out = embed(*this, n);
  for (const auto& k : o.indices()) {
    auto v = out.at(k);
    const auto w = o.at(k);
    for (int i = 0; i < 3; ++i) v[i] += w[i];
    out.set(k, v);
  }
  return out;
}

ChannelCoefficients ChannelCoefficients::operator-(const ChannelCoefficients& o) const {
  return *this + (-1.0) * o;
}

ChannelCoefficients operator*(double s, const ChannelCoefficients& c) {
  ChannelCoefficients out = c;
  for (auto& v : out.data_)
    for (auto& x : v) x *= s;
  return out;
}

Complex basis_eval(const Index3& k, double x, double y, double z, const ChannelDomain& domain) {
  return std::exp(2.0 * pi * I * (k[0] * x / domain.Lx + k[2] * z / domain.Lz)) *
         std::sin(pi * k[1] * y);
}

// ------------------------------------------------------------- divergence

Vec3c k_hat(const Index3& k, int n, const ChannelDomain& d) {
  return {pi * I * double(k[0]) / d.Lx, Complex(hat_sum(k[1], n), 0.0),
          pi * I * double(k[2]) / d.Lz};
}

DivergenceReport divergence_residual(const ChannelCoefficients& c, const ChannelDomain& domain,
                                     OracleGrid spec) {
  domain.validate();
  DivergenceReport r;
  const auto g = make_grid(c.n(), domain, spec);
  const auto& d = domain;
  auto sines = synthesize(
      g, c.n(),
      [&](const Index3& k) {
        const auto a = c.at(k);
        return 2.0 * pi * I * (double(k[0]) / d.Lx * a[0] + double(k[2]) / d.Lz * a[2]);
      },
      false);
  const auto cosines =
      synthesize(g, c.n(), [&](const Index3& k) { return pi * k[1] * c.at(k)[1]; }, true);
  for (std::size_t i = 0; i < sines.size(); ++i) sines[i] += cosines[i];
  double ignored = 0.0;
  r.oracle = std::sqrt(l2(g, real_part(sines, ignored)));

  double acc = 0.0;
  for (const auto& k : c.indices()) {
    const auto a = c.at(k);
    const Complex rel = pi * I * (double(k[0]) / d.Lx * a[0] + double(k[2]) / d.Lz * a[2]) +
                        hat_sum(k[1], c.n()) * a[1];
    acc += std::norm(rel);
  }
  r.verbatim = std::sqrt(acc);
  return r;
}

ChannelCoefficients project_divergence_free(const ChannelCoefficients& c,
                                            const ChannelDomain& domain) {
  domain.validate();
  ChannelCoefficients out(c.n());
  for (const auto& k : c.indices()) {
    if (k[1] == 0) continue;
    auto a = c.at(k);
    a[1] = 0.0;
    const double q1 = k[0] / domain.Lx, q3 = k[2] / domain.Lz;
    const double q2 = q1 * q1 + q3 * q3;
    if (q2 > 0.0) {
      const Complex s = (q1 * a[0] + q3 * a[2]) / q2;
      a[0] -= q1 * s;
      a[2] -= q3 * s;
    }
    out.set(k, a);
  }
  return out;
}

// ----------------------------------------------------------------- Stokes

double stokes_factor(const Index3& k, const ChannelDomain& d) {
  return 4.0 * pi * pi *
         (k[0] * k[0] / (d.Lx * d.Lx) + k[1] * k[1] / 4.0 + k[2] * k[2] / (d.Lz * d.Lz));
}

ChannelCoefficients stokes_channel(const ChannelCoefficients& c, const ChannelDomain& domain) {
  domain.validate();
  ChannelCoefficients out(c.n());
  for (const auto& k : c.indices()) {
    auto a = c.at(k);
    for (auto& x : a) x *= stokes_factor(k, domain);
    out.set(k, a);
  }
  return out;
}

ChannelCoefficients stokes_channel_oracle(const ChannelCoefficients& c,
                                          const ChannelDomain& domain, OracleGrid spec) {
  domain.validate();
  const auto g = make_grid(c.n(), domain, spec);
  std::array<std::vector<Complex>, 3> comps;
  for (int i = 0; i < 3; ++i) {
    // -Laplacian: second derivatives of the basis, summed.
    const auto lap = synthesize(
        g, c.n(), [&](const Index3& k) { return laplacian_factor(k, domain) * c.at(k)[i]; },
        false);
    comps[i] = analyze(g, lap, c.n());
  }
  return from_analysis(comps, c.n());
}

// -------------------------------------------------------------- nonlinear

ChannelCoefficients nonlinear_channel_oracle(const ChannelCoefficients& c,
                                             const ChannelDomain& domain, OracleGrid spec) {
  domain.validate();
  const int nn = 2 * c.n();
  const auto g = make_grid(c.n(), domain, spec);
  const auto p = physical(g, c);
  std::array<std::vector<Complex>, 3> comps;
  for (int i = 0; i < 3; ++i) {
    Samples f(g.size());
    for (std::size_t q = 0; q < g.size(); ++q)
      f[q] = p.u[0][q] * p.grad[i][0][q] + p.u[1][q] * p.grad[i][1][q] +
             p.u[2][q] * p.grad[i][2][q];
    comps[i] = analyze(g, f, nn);
  }
  return project_divergence_free(from_analysis(comps, nn), domain);
}

ChannelCoefficients nonlinear_channel_verbatim(const ChannelCoefficients& c,
                                               const ChannelDomain& domain) {
  domain.validate();
  const int n = c.n();
  if (n > 4) throw InputError("the literal triple sum is limited to n <= 4");
  ChannelCoefficients out(2 * n);
  for (const auto& k : out.indices()) {
    const auto kh = k_hat(k, n, domain);
    const double kh2 = norm2(kh);
    Vec3c acc{};
    for (int j1 = std::min(k[0], 0); j1 <= std::max(k[0], 0); ++j1)
      for (int j2 = std::min(k[1], 0); j2 <= std::max(k[1], 0); ++j2)
        for (int j3 = std::min(k[2], 0); j3 <= std::max(k[2], 0); ++j3) {
          const Index3 j{j1, j2, j3};
          const Vec3c aj = c.at(j);
          if (norm2(aj) == 0.0) continue;
          Vec3c proj = aj;
          if (kh2 > 0.0) {
            const Complex s = bilinear(aj, kh) / kh2;
            for (int i = 0; i < 3; ++i) proj[i] -= kh[i] * s;
          }
          const Vec3c jv{double(j1), double(j2), double(j3)};
          for (int m = (k[1] + 1) / 2; m <= (k[1] + 2 * n) / 2; ++m) {
            const Index3 km_minus_j{k[0] - j1, 2 * m + 1 - k[1] - j2, k[2] - j3};
            const Complex adv = bilinear(c.at(km_minus_j), jv);
            if (adv == 0.0) continue;
            const double w = (1.0 / (2 * m - 2 * j2 + 1) + 1.0 / (2 * m - 2 * j2 - 2 * k[1] + 1) -
                              1.0 / (2 * m + 1) - 1.0 / (2 * m - 2 * k[1] + 1)) /
                             pi;
            for (int i = 0; i < 3; ++i) acc[i] += 2.0 * adv * proj[i] * w;
          }
        }
    out.set(k, acc);
  }
  return out;
}

NonlinearComparison nonlinear_channel(const ChannelCoefficients& c, const ChannelDomain& domain,
                                      OracleGrid spec) {
  NonlinearComparison r{nonlinear_channel_oracle(c, domain, spec),
                        nonlinear_channel_verbatim(c, domain), {}, 0.0};
  for (const auto& k : r.oracle.indices()) {
    if (k[1] == 0) continue;
    const auto a = r.oracle.at(k);
    const auto b = r.verbatim.at(k);
    const Vec3c d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    ModeDiscrepancy row{k, std::sqrt(norm2(a)), std::sqrt(norm2(b)), std::sqrt(norm2(d))};
    r.max_diff = std::max(r.max_diff, row.diff_abs);
    if (row.oracle_abs > 1e-14 || row.verbatim_abs > 1e-14) r.table.push_back(row);
  }
  return r;
}

// ------------------------------------------------------------------ norms

ChannelNorms channel_norms(const ChannelCoefficients& c, const ChannelDomain& domain,
                           OracleGrid spec) {
  domain.validate();
  ChannelNorms r;
  const auto g = make_grid(c.n(), domain, spec);
  const auto p = physical(g, c);
  r.max_imag_ratio = p.max_imag_ratio;
  double du2 = 0.0, u2 = 0.0, au2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    u2 += l2(g, p.u[i]);
    for (int j = 0; j < 3; ++j) du2 += l2(g, p.grad[i][j]);
    const auto lap = synthesize(
        g, c.n(), [&](const Index3& k) { return laplacian_factor(k, domain) * c.at(k)[i]; },
        false);
    au2 += l2(g, real_part(lap, r.max_imag_ratio));
  }
  r.l2_oracle = std::sqrt(u2);
  r.du_oracle = std::sqrt(du2);
  r.au_oracle = std::sqrt(au2);

  double dv = 0.0, av = 0.0;
  for (const auto& k : c.indices()) {
    const double a2 = norm2(c.at(k));
    if (a2 == 0.0) continue;
    const auto kh = k_hat(k, c.n(), domain);
    dv += a2 * std::norm(kh[0] + kh[1] + kh[2]);
    const double f = stokes_factor(k, domain) / (4.0 * pi * pi);
    av += a2 * f * f;
  }
  r.du_verbatim = std::sqrt(2.0 * domain.Lx * domain.Lz * dv);
  r.au_verbatim = std::sqrt(2.0 * pi * pi * domain.Lx * domain.Lz * av);
  return r;
}

// ---------------------------------------------------------------- forcing

ChannelCoefficients channel_forcing(int n) {
  ChannelCoefficients out(n);
  for (int k2 = 1; k2 <= n; k2 += 2) {
    const double b = 4.0 / (pi * k2);
    out.set({0, k2, 0}, {b, 0.0, b});
  }
  return out;
}

// ----------------------------------------------------------- certificates

Trajectory channel_certificate_inputs(const std::vector<ChannelSample>& samples,
                                      const ChannelDomain& domain, double nu,
                                      ChannelEvaluation mode, OracleGrid spec) {
  domain.validate();
  if (!(nu > 0.0)) throw InputError("viscosity nu must be positive");
  Trajectory traj;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& sample = samples[s];
    if (!sample.dalpha_dt)
      throw InputError("channel sample " + std::to_string(s) + " has no time derivative");
    if (s > 0 && !(sample.t > samples[s - 1].t))
      throw InputError("channel sample times must increase strictly");
    const int n = sample.alpha.n();
    traj.cutoff = n;
    const bool oracle = mode == ChannelEvaluation::oracle;
    const auto b = oracle ? nonlinear_channel_oracle(sample.alpha, domain, spec)
                          : nonlinear_channel_verbatim(sample.alpha, domain);
    const auto a = oracle ? stokes_channel_oracle(sample.alpha, domain, spec)
                          : stokes_channel(sample.alpha, domain);
    const auto beta = embed(*sample.dalpha_dt, 2 * n) + embed(nu * a, 2 * n) + b;
    const auto norms = channel_norms(sample.alpha, domain, spec);
    NormSample ns;
    if (oracle) {
      ns.u_l2 = norms.l2_oracle;
      ns.du = norms.du_oracle;
      ns.au = norms.au_oracle;
      ns.r_v1 = gradient_norm(make_grid(2 * n, domain, spec), beta);
    } else {
      ns.du = norms.du_verbatim;
      ns.au = norms.au_verbatim;
      double acc = 0.0;
      for (const auto& k : beta.indices()) {
        const auto kh = k_hat(k, n, domain);
        acc += norm2(beta.at(k)) * std::norm(kh[0] + kh[1] + kh[2]);
      }
      ns.r_v1 = std::sqrt(2.0 * domain.Lx * domain.Lz * acc);
    }
    traj.times.push_back(sample.t);
    traj.norms.push_back(ns);
  }
  return traj;
}

// ---------------------------------------------------------------- helpers

ChannelCoefficients random_channel_coefficients(int n, const ChannelDomain& domain,
                                                std::uint64_t seed, double decay) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ChannelCoefficients c(n);
  for (const auto& k : c.indices()) {
    if (k[1] == 0) continue;
    const bool representative = k[0] > 0 || (k[0] == 0 && k[2] >= 0);
    if (!representative) continue;
    const double amp = std::pow(1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2], -0.5 * decay);
    Vec3c v;
    for (auto& x : v) {
      const double re = normal(rng);
      const double im = normal(rng);
      x = amp * Complex(re, im);
    }
    if (k[0] == 0 && k[2] == 0)
      for (auto& x : v) x = x.real();
    c.set_with_partner(k, v);
  }
  return project_divergence_free(c, domain);
}

void write_channel(std::ostream& out, const ChannelCoefficients& c, const ChannelDomain& domain) {
  std::vector<Index3> nonzero;
  for (const auto& k : c.indices())
    if (norm2(c.at(k)) != 0.0) nonzero.push_back(k);
  out << "nsverify-channel 1\n";
  out << "domain " << format_real(domain.Lx) << ' ' << format_real(domain.Lz) << '\n';
  out << "n " << c.n() << '\n';
  out << "modes " << nonzero.size() << '\n';
  for (const auto& k : nonzero) {
    out << k[0] << ' ' << k[1] << ' ' << k[2];
    for (const auto& x : c.at(k)) out << ' ' << format_real(x.real()) << ' ' << format_real(x.imag());
    out << '\n';
  }
}

std::pair<ChannelCoefficients, ChannelDomain> read_channel(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&](const char* what) {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos && line[0] != '#') return;
    }
    throw InputError(std::string("channel file: unexpected end of input, expected ") + what);
  };
  auto fail = [&](const std::string& msg) {
    throw InputError("channel file line " + std::to_string(lineno) + ": " + msg);
  };
  next("header");
  if (line.rfind("nsverify-channel 1", 0) != 0) fail("expected header 'nsverify-channel 1'");
  ChannelDomain domain;
  std::string tag;
  next("domain");
  {
    std::istringstream s(line);
    if (!(s >> tag >> domain.Lx >> domain.Lz) || tag != "domain") fail("expected 'domain Lx Lz'");
  }
  try {
    domain.validate();
  } catch (const InputError& e) {
    fail(e.what());
  }
  int n = 0;
  next("n");
  {
    std::istringstream s(line);
    if (!(s >> tag >> n) || tag != "n" || n < 0) fail("expected 'n N' with N >= 0");
  }
  long count = 0;
  next("modes");
  {
    std::istringstream s(line);
    if (!(s >> tag >> count) || tag != "modes" || count < 0) fail("expected 'modes M'");
  }
  ChannelCoefficients c(n);
  for (long r = 0; r < count; ++r) {
    next("mode record");
    std::istringstream s(line);
    Index3 k;
    double v[6];
    if (!(s >> k[0] >> k[1] >> k[2] >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5]))
      fail("expected 'k1 k2 k3' and six reals");
    std::string extra;
    if (s >> extra) fail("trailing text '" + extra + "'");
    if (!c.in_range(k)) fail("mode index outside the truncation");
    for (double x : v)
      if (!std::isfinite(x)) fail("non-finite coefficient");
    c.set(k, {Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5])});
  }
  double scale = 0.0;
  for (const auto& k : c.indices()) scale = std::max(scale, std::sqrt(norm2(c.at(k))));
  if (c.reality_error() > 1e-12 * std::max(1.0, scale))
    throw InputError("channel file: coefficients violate alpha(-k1,k2,-k3) = conj(alpha(k))");
  return {c, domain};
}

std::string discrepancy_csv(const std::vector<ModeDiscrepancy>& table) {
  std::string out = "k1,k2,k3,oracle_abs,verbatim_abs,diff_abs\n";
  for (const auto& r : table)
    out += std::to_string(r.k[0]) + "," + std::to_string(r.k[1]) + "," + std::to_string(r.k[2]) +
           "," + format_real(r.oracle_abs) + "," + format_real(r.verbatim_abs) + "," +
           format_real(r.diff_abs) + "\n";
  return out;
}

}  // namespace nsverify::channel
