#include "nsverify/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "fft_grid.hpp"
#include "nsverify/errors.hpp"

namespace nsverify {

namespace {

constexpr double kCutoffSlack = 1e-12;
constexpr double kDivergenceTolerance = 1e-12;

double norm2(const Vec3c& v) {
  return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

std::complex<double> dot(const Vec3& k, const Vec3c& v) {
  return k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
}

Vec3c conj(const Vec3c& v) { return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; }

void require_same_modes(const SpectralVelocityField& a, const SpectralVelocityField& b,
                        const char* what) {
  if (!a.modes().same_as(b.modes()))
    throw InputError(std::string(what) + ": fields live on different mode sets");
}

void require_same_domain(const SpectralVelocityField& a, const SpectralVelocityField& b,
                         const char* what) {
  if (!(a.domain() == b.domain()))
    throw InputError(std::string(what) + ": fields live on different domains");
}

}  // namespace

// ---------------------------------------------------------------- domain

void DomainSpec::validate() const {
  for (double p : periods)
    if (!(p > 0.0) || !std::isfinite(p)) throw InputError("domain periods must be positive");
}

Vec3 DomainSpec::wavenumber(const WaveVector& k) const {
  Vec3 kt{};
  for (int i = 0; i < 3; ++i) kt[i] = (2.0 * std::numbers::pi / periods[i]) * k[i];
  return kt;
}

double DomainSpec::eigenvalue(const WaveVector& k) const {
  const Vec3 kt = wavenumber(k);
  return kt[0] * kt[0] + kt[1] * kt[1] + kt[2] * kt[2];
}

bool is_representative(const WaveVector& k) {
  if (k[2] != 0) return k[2] > 0;
  if (k[1] != 0) return k[1] > 0;
  return k[0] > 0;
}

// --------------------------------------------------------------- mode set

ModeSet::ModeSet(const DomainSpec& domain, double cutoff) : domain_(domain), cutoff_(cutoff) {
  domain_.validate();
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff))
    throw InputError("eigenvalue cutoff must be finite and nonnegative");
  std::array<int, 3> bound{};
  for (int i = 0; i < 3; ++i)
    bound[i] = static_cast<int>(std::floor(std::sqrt(cutoff) * domain.periods[i] /
                                           (2.0 * std::numbers::pi))) + 1;
  struct Entry {
    double lambda;
    WaveVector k;
  };
  std::vector<Entry> entries;
  const double limit = cutoff * (1.0 + kCutoffSlack);
  for (int a = -bound[0]; a <= bound[0]; ++a)
    for (int b = -bound[1]; b <= bound[1]; ++b)
      for (int c = -bound[2]; c <= bound[2]; ++c) {
        const WaveVector k{a, b, c};
        if (!is_representative(k)) continue;
        const double lambda = domain.eigenvalue(k);
        if (lambda <= limit) entries.push_back({lambda, k});
      }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.lambda, x.k) < std::tie(y.lambda, y.k);
  });
  modes_.reserve(entries.size());
  eigenvalues_.reserve(entries.size());
  for (const auto& e : entries) {
    modes_.push_back(e.k);
    eigenvalues_.push_back(e.lambda);
    for (int i = 0; i < 3; ++i) max_index_[i] = std::max(max_index_[i], std::abs(e.k[i]));
  }
  const auto extent = [&](int i) { return static_cast<std::size_t>(2 * max_index_[i] + 1); };
  table_.assign(extent(0) * extent(1) * extent(2), -1);
  for (std::size_t i = 0; i < modes_.size(); ++i) table_[slot(modes_[i])] = static_cast<std::ptrdiff_t>(i);
}

std::size_t ModeSet::slot(const WaveVector& k) const {
  const auto e1 = static_cast<std::size_t>(2 * max_index_[1] + 1);
  const auto e2 = static_cast<std::size_t>(2 * max_index_[2] + 1);
  return (static_cast<std::size_t>(k[0] + max_index_[0]) * e1 +
          static_cast<std::size_t>(k[1] + max_index_[1])) * e2 +
         static_cast<std::size_t>(k[2] + max_index_[2]);
}

std::optional<ModeSet::Lookup> ModeSet::find(const WaveVector& k) const {
  if (k == WaveVector{0, 0, 0}) return std::nullopt;
  const bool rep = is_representative(k);
  const WaveVector r = rep ? k : WaveVector{-k[0], -k[1], -k[2]};
  for (int i = 0; i < 3; ++i)
    if (std::abs(r[i]) > max_index_[i]) return std::nullopt;
  const auto idx = table_[slot(r)];
  if (idx < 0) return std::nullopt;
  return Lookup{static_cast<std::size_t>(idx), !rep};
}

std::size_t ModeSet::prefix_length(double cutoff) const {
  const double limit = cutoff * (1.0 + kCutoffSlack);
  return static_cast<std::size_t>(
      std::upper_bound(eigenvalues_.begin(), eigenvalues_.end(), limit) - eigenvalues_.begin());
}

std::shared_ptr<const ModeSet> ModeSet::make(const DomainSpec& domain, double cutoff) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, double, double>, std::shared_ptr<const ModeSet>> cache;
  const auto key = std::make_tuple(domain.periods[0], domain.periods[1], domain.periods[2], cutoff);
  {
    const std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto made = std::make_shared<const ModeSet>(domain, cutoff);
  const std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(made)).first->second;
}

// ------------------------------------------------------------------ field

SpectralVelocityField::SpectralVelocityField(ModeSetPtr modes)
    : modes_(std::move(modes)), coeffs_(modes_->size(), Vec3c{}) {}

SpectralVelocityField::SpectralVelocityField(unchecked_t, ModeSetPtr modes,
                                             std::vector<Vec3c> coeffs)
    : modes_(std::move(modes)), coeffs_(std::move(coeffs)) {}

SpectralVelocityField::SpectralVelocityField(ModeSetPtr modes, std::vector<Vec3c> coeffs)
    : modes_(std::move(modes)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != modes_->size())
    throw InputError("coefficient count does not match the mode set");
  const auto wave = modes_->modes();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (const auto& c : coeffs_[i])
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw InputError("non-finite field coefficient");
    const double mag = std::sqrt(norm2(coeffs_[i]));
    const double div = std::abs(dot(domain().wavenumber(wave[i]), coeffs_[i]));
    if (div > kDivergenceTolerance * mag)
      throw InputError("coefficient of mode (" + std::to_string(wave[i][0]) + "," +
                       std::to_string(wave[i][1]) + "," + std::to_string(wave[i][2]) +
                       ") is not divergence-free");
  }
}

SpectralVelocityField SpectralVelocityField::zero(const DomainSpec& domain, double cutoff) {
  return SpectralVelocityField(ModeSet::make(domain, cutoff));
}

Vec3c SpectralVelocityField::coefficient(const WaveVector& k) const {
  const auto hit = modes_->find(k);
  if (!hit) return Vec3c{};
  return hit->conjugate ? conj(coeffs_[hit->index]) : coeffs_[hit->index];
}

double SpectralVelocityField::max_divergence_ratio() const {
  double worst = 0.0;
  const auto wave = modes_->modes();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double mag = std::sqrt(norm2(coeffs_[i]));
    if (mag == 0.0) continue;
    worst = std::max(worst, std::abs(dot(domain().wavenumber(wave[i]), coeffs_[i])) / mag);
  }
  return worst;
}

bool SpectralVelocityField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Vec3c& c) { return norm2(c) == 0.0; });
}

SpectralVelocityField operator+(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  require_same_modes(a, b, "field addition");
  std::vector<Vec3c> out(a.coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = a.coeffs_[i][c] + b.coeffs_[i][c];
  return {SpectralVelocityField::unchecked_t{}, a.modes_, std::move(out)};
}

SpectralVelocityField operator-(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  require_same_modes(a, b, "field subtraction");
  std::vector<Vec3c> out(a.coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = a.coeffs_[i][c] - b.coeffs_[i][c];
  return {SpectralVelocityField::unchecked_t{}, a.modes_, std::move(out)};
}

SpectralVelocityField operator*(double s, const SpectralVelocityField& a) {
  std::vector<Vec3c> out(a.coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = s * a.coeffs_[i][c];
  return {SpectralVelocityField::unchecked_t{}, a.modes_, std::move(out)};
}

SpectralVelocityField operator-(const SpectralVelocityField& a) { return -1.0 * a; }

// ------------------------------------------------------------ projections

Vec3c leray_project_mode(const Vec3& kt, const Vec3c& value) {
  const double k2 = kt[0] * kt[0] + kt[1] * kt[1] + kt[2] * kt[2];
  if (k2 == 0.0) return Vec3c{};
  const std::complex<double> s = dot(kt, value) / k2;
  return {value[0] - kt[0] * s, value[1] - kt[1] * s, value[2] - kt[2] * s};
}

SpectralVelocityField leray_project(std::span<const RawMode> raw, const DomainSpec& domain,
                                    double cutoff) {
  auto modes = ModeSet::make(domain, cutoff);
  std::vector<Vec3c> coeffs(modes->size(), Vec3c{});
  // 0 = unset, 1 = set from the representative, 2 = set from its partner.
  std::vector<unsigned char> origin(modes->size(), 0);
  for (const auto& entry : raw) {
    if (entry.k == WaveVector{0, 0, 0}) continue;
    const auto hit = modes->find(entry.k);
    if (!hit)
      throw InputError("raw mode (" + std::to_string(entry.k[0]) + "," +
                       std::to_string(entry.k[1]) + "," + std::to_string(entry.k[2]) +
                       ") lies above the cutoff");
    const Vec3c value = hit->conjugate ? conj(entry.value) : entry.value;
    const unsigned char tag = hit->conjugate ? 2 : 1;
    auto& slot_origin = origin[hit->index];
    if (slot_origin == tag) throw InputError("duplicate raw mode entry");
    if (slot_origin != 0) {
      const Vec3c& prev = coeffs[hit->index];
      double diff = 0.0;
      for (int c = 0; c < 3; ++c) diff += std::norm(prev[c] - value[c]);
      const double scale = std::max(norm2(prev), norm2(value));
      if (std::sqrt(diff) > 1e-12 * std::sqrt(scale))
        throw InputError("raw modes violate the reality symmetry u_{-k} = conj(u_k)");
      continue;
    }
    slot_origin = tag;
    coeffs[hit->index] = value;
  }
  const auto wave = modes->modes();
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] = leray_project_mode(domain.wavenumber(wave[i]), coeffs[i]);
  return {SpectralVelocityField::unchecked_t{}, std::move(modes), std::move(coeffs)};
}

SpectralVelocityField stokes_power(const SpectralVelocityField& u, double s) {
  const auto lambda = u.modes().eigenvalues();
  std::vector<Vec3c> out(u.coefficients().begin(), u.coefficients().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double f = std::pow(lambda[i], s);
    for (auto& c : out[i]) c *= f;
  }
  return {SpectralVelocityField::unchecked_t{}, u.mode_set(), std::move(out)};
}

SpectralVelocityField stokes_apply(const SpectralVelocityField& u) {
  const auto lambda = u.modes().eigenvalues();
  std::vector<Vec3c> out(u.coefficients().begin(), u.coefficients().end());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto& c : out[i]) c *= lambda[i];
  return {SpectralVelocityField::unchecked_t{}, u.mode_set(), std::move(out)};
}

double sobolev_norm(const SpectralVelocityField& u, double m) {
  if (!(m >= 0.0)) throw InputError("Sobolev index must be nonnegative");
  const auto lambda = u.modes().eigenvalues();
  const auto coeffs = u.coefficients();
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    sum += std::pow(lambda[i], m) * norm2(coeffs[i]);
  // Factor 2: each stored representative stands for the pair +-k.
  return std::sqrt(u.domain().volume() * 2.0 * sum);
}

double inner_product(const SpectralVelocityField& u, const SpectralVelocityField& v) {
  require_same_modes(u, v, "inner product");
  const auto a = u.coefficients();
  const auto b = v.coefficients();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int c = 0; c < 3; ++c) sum += (a[i][c] * std::conj(b[i][c])).real();
  return u.domain().volume() * 2.0 * sum;
}

SpectralVelocityField galerkin_project(const SpectralVelocityField& u, double cutoff) {
  const std::size_t keep = u.modes().prefix_length(cutoff);
  std::vector<Vec3c> out(u.coefficients().begin(), u.coefficients().end());
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(), Vec3c{});
  return {SpectralVelocityField::unchecked_t{}, u.mode_set(), std::move(out)};
}

SpectralVelocityField tail_project(const SpectralVelocityField& u, double cutoff) {
  const std::size_t keep = u.modes().prefix_length(cutoff);
  std::vector<Vec3c> out(u.coefficients().begin(), u.coefficients().end());
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), Vec3c{});
  return {SpectralVelocityField::unchecked_t{}, u.mode_set(), std::move(out)};
}

std::size_t real_mode_count(const DomainSpec& domain, double cutoff) {
  return 4 * ModeSet::make(domain, cutoff)->size();
}

double cutoff_for_mode_count(const DomainSpec& domain, std::size_t n_modes) {
  // Grow a search cutoff until it holds more than n_modes basis functions,
  // then walk the shells of that set.
  double search = 1.0;
  for (int i = 0; i < 3; ++i)
    search = std::max(search, std::pow(2.0 * std::numbers::pi / domain.periods[i], 2));
  while (real_mode_count(domain, search) <= n_modes) search *= 2.0;
  const auto modes = ModeSet::make(domain, search);
  const auto lambda = modes->eigenvalues();
  double best = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const bool shell_end = i + 1 == lambda.size() || lambda[i + 1] != lambda[i];
    if (shell_end && 4 * (i + 1) <= n_modes) best = lambda[i];
  }
  return best;
}

SpectralVelocityField with_cutoff(const SpectralVelocityField& u, double cutoff) {
  auto target = ModeSet::make(u.domain(), cutoff);
  std::vector<Vec3c> out(target->size(), Vec3c{});
  const auto wave = target->modes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u.coefficient(wave[i]);
  return {SpectralVelocityField::unchecked_t{}, std::move(target), std::move(out)};
}

double product_cutoff(double a, double b) {
  const double r = std::sqrt(a) + std::sqrt(b);
  return r * r * (1.0 + 1e-10);
}

// ---------------------------------------------------------- nonlinearity

SpectralVelocityField nonlinear_term(const SpectralVelocityField& u,
                                     const SpectralVelocityField& v, double out_cutoff) {
  require_same_domain(u, v, "nonlinear term");
  const DomainSpec& domain = u.domain();
  auto out_modes = ModeSet::make(domain, out_cutoff);
  std::vector<Vec3c> out(out_modes->size(), Vec3c{});
  if (u.is_zero() || v.is_zero() || out_modes->size() == 0)
    return {SpectralVelocityField::unchecked_t{}, std::move(out_modes), std::move(out)};

  // A grid of size Ku + Kv + Kout + 1 per axis keeps every alias of the
  // product spectrum (support |q| <= Ku + Kv) off the retained modes.
  std::array<int, 3> dims{};
  for (int i = 0; i < 3; ++i)
    dims[i] = detail::fft_friendly_size(u.modes().max_index()[i] + v.modes().max_index()[i] +
                                        out_modes->max_index()[i] + 1);

  auto scatter = [](detail::ComplexGrid& grid, const SpectralVelocityField& f, auto&& value) {
    grid.fill_zero();
    const auto wave = f.modes().modes();
    const auto coeffs = f.coefficients();
    for (std::size_t i = 0; i < wave.size(); ++i) {
      const auto& k = wave[i];
      const std::complex<double> c = value(k, coeffs[i]);
      grid[grid.wrap_index(k[0], k[1], k[2])] = c;
      grid[grid.wrap_index(-k[0], -k[1], -k[2])] = std::conj(c);
    }
  };

  std::array<detail::ComplexGrid, 3> velocity{detail::ComplexGrid(dims), detail::ComplexGrid(dims),
                                              detail::ComplexGrid(dims)};
  for (int j = 0; j < 3; ++j) {
    scatter(velocity[j], u, [j](const WaveVector&, const Vec3c& c) { return c[j]; });
    velocity[j].transform(FFTW_BACKWARD);
  }

  detail::ComplexGrid gradient(dims);
  detail::ComplexGrid product(dims);
  const double inv_points = 1.0 / static_cast<double>(product.size());
  const auto out_wave = out_modes->modes();
  std::vector<Vec3c> raw(out_modes->size(), Vec3c{});
  for (int i = 0; i < 3; ++i) {
    product.fill_zero();
    for (int j = 0; j < 3; ++j) {
      scatter(gradient, v, [&](const WaveVector& k, const Vec3c& c) {
        return std::complex<double>(0.0, domain.wavenumber(k)[j]) * c[i];
      });
      gradient.transform(FFTW_BACKWARD);
      for (std::size_t p = 0; p < product.size(); ++p)
        product[p] += velocity[j][p].real() * gradient[p].real();
    }
    product.transform(FFTW_FORWARD);
    for (std::size_t m = 0; m < out_wave.size(); ++m) {
      const auto& k = out_wave[m];
      raw[m][i] = product[product.wrap_index(k[0], k[1], k[2])] * inv_points;
    }
  }
  for (std::size_t m = 0; m < out_wave.size(); ++m)
    out[m] = leray_project_mode(domain.wavenumber(out_wave[m]), raw[m]);
  return {SpectralVelocityField::unchecked_t{}, std::move(out_modes), std::move(out)};
}

SpectralVelocityField nonlinear_term(const SpectralVelocityField& u,
                                     const SpectralVelocityField& v) {
  return nonlinear_term(u, v, product_cutoff(u.cutoff(), v.cutoff()));
}

double trilinear_form(const SpectralVelocityField& u, const SpectralVelocityField& v,
                      const SpectralVelocityField& w) {
  require_same_domain(u, w, "trilinear form");
  return inner_product(nonlinear_term(u, v, w.cutoff()), w);
}

double trilinear_with_stokes(const SpectralVelocityField& u, const SpectralVelocityField& v,
                             const SpectralVelocityField& w) {
  require_same_domain(u, w, "trilinear form");
  return inner_product(nonlinear_term(u, v, w.cutoff()), stokes_apply(w));
}

Vec3 evaluate(const SpectralVelocityField& u, const Vec3& x) {
  Vec3 out{0.0, 0.0, 0.0};
  const auto wave = u.modes().modes();
  const auto coeffs = u.coefficients();
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const Vec3 kt = u.domain().wavenumber(wave[i]);
    const double phase = kt[0] * x[0] + kt[1] * x[1] + kt[2] * x[2];
    const std::complex<double> e(std::cos(phase), std::sin(phase));
    for (int c = 0; c < 3; ++c) out[c] += 2.0 * (coeffs[i][c] * e).real();
  }
  return out;
}

}  // namespace nsverify
