#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nsverify/errors.hpp"
#include "nsverify/field_io.hpp"
#include "nsverify/field_presets.hpp"
#include "nsverify/spectral_field.hpp"
#include "oracles.hpp"

using namespace nsverify;
using std::numbers::pi;

namespace {

const DomainSpec box{};

double max_abs(std::span<const Vec3c> c) {
  double m = 0.0;
  for (const auto& v : c)
    for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double max_diff(std::span<const Vec3c> a, std::span<const Vec3c> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a[i][c] - b[i][c]));
  return m;
}

void check_invariants(const SpectralVelocityField& u) {
  CHECK(u.max_divergence_ratio() <= 1e-12);
  const auto wave = u.modes().modes();
  const auto lambda = u.modes().eigenvalues();
  for (std::size_t i = 0; i < wave.size(); ++i) {
    CHECK(is_representative(wave[i]));
    CHECK(lambda[i] <= u.cutoff() * (1 + 1e-12));
  }
}

}  // namespace

TEST_CASE("mode sets are shell-ordered and hold one member per pair") {
  const auto modes = ModeSet::make(box, 2.0);
  // |k|^2 = 1: 3 representatives; |k|^2 = 2: 6 representatives.
  CHECK(modes->size() == 9);
  CHECK(modes->prefix_length(1.0) == 3);
  CHECK(modes->prefix_length(0.5) == 0);
  for (std::size_t i = 1; i < modes->size(); ++i)
    CHECK(modes->eigenvalues()[i - 1] <= modes->eigenvalues()[i]);
  const auto hit = modes->find({-1, 0, 0});
  REQUIRE(hit);
  CHECK(hit->conjugate);
  CHECK_FALSE(modes->find({0, 0, 0}));
  CHECK_FALSE(modes->find({2, 0, 0}));
  CHECK(ModeSet::make(box, 2.0).get() == modes.get());

  const DomainSpec stretched{{2 * pi, 4 * pi, pi}};
  const auto s = ModeSet::make(stretched, 1.0);
  // kt = (k1, k2/2, 2 k3): admissible are (1,0,0), (0,1,0), (0,2,0).
  CHECK(s->size() == 3);
  CHECK(stretched.eigenvalue({0, 1, 0}) == doctest::Approx(0.25));
}

TEST_CASE("leray projection") {
  const std::vector<RawMode> longitudinal{{{1, 0, 0}, {1.0, 0.0, 0.0}}};
  CHECK(leray_project(longitudinal, box, 2.0).is_zero());

  const std::vector<RawMode> transverse{{{1, 0, 0}, {0.0, 1.0, 0.0}}};
  const auto t = leray_project(transverse, box, 2.0);
  CHECK(t.coefficient({1, 0, 0})[1] == std::complex<double>(1.0, 0.0));
  CHECK(t.coefficient({-1, 0, 0})[1] == std::complex<double>(1.0, 0.0));

  const std::vector<RawMode> diagonal{{{1, 1, 0}, {1.0, 0.0, 0.0}}};
  const auto d = leray_project(diagonal, box, 2.0).coefficient({1, 1, 0});
  CHECK(std::abs(d[0] - 0.5) < 1e-15);
  CHECK(std::abs(d[1] + 0.5) < 1e-15);
  CHECK(std::abs(d[2]) == 0.0);

  // k = 0 is dropped; both pair members listed consistently are accepted.
  const std::vector<RawMode> with_mean{{{0, 0, 0}, {1.0, 1.0, 1.0}},
                                       {{0, 1, 0}, {std::complex<double>(0, 2), 0.0, 0.0}},
                                       {{0, -1, 0}, {std::complex<double>(0, -2), 0.0, 0.0}}};
  const auto m = leray_project(with_mean, box, 1.0);
  CHECK(m.coefficient({0, 1, 0})[0] == std::complex<double>(0, 2));

  const std::vector<RawMode> unreal{{{0, 1, 0}, {1.0, 0.0, 0.0}}, {{0, -1, 0}, {2.0, 0.0, 0.0}}};
  CHECK_THROWS_AS(leray_project(unreal, box, 1.0), InputError);
  const std::vector<RawMode> dup{{{0, 1, 0}, {1.0, 0.0, 0.0}}, {{0, 1, 0}, {1.0, 0.0, 0.0}}};
  CHECK_THROWS_AS(leray_project(dup, box, 1.0), InputError);
  const std::vector<RawMode> high{{{2, 0, 0}, {0.0, 1.0, 0.0}}};
  CHECK_THROWS_AS(leray_project(high, box, 1.0), InputError);
}

TEST_CASE("constructor rejects compressible coefficients") {
  auto modes = ModeSet::make(box, 1.0);
  std::vector<Vec3c> c(modes->size(), Vec3c{});
  c[modes->find({1, 0, 0})->index] = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(SpectralVelocityField(modes, c), InputError);
}

TEST_CASE("Stokes operator multiplies by the eigenvalue") {
  const auto u = single_mode(box, 5.0, {1, 0, 0}, {0.0, 1.0, 0.0});
  CHECK(stokes_apply(u).coefficient({1, 0, 0})[1] == std::complex<double>(1.0, 0.0));
  const auto v = single_mode(box, 5.0, {1, 2, 0}, {0.0, 0.0, 1.0});
  CHECK(stokes_apply(v).coefficient({1, 2, 0})[2] == std::complex<double>(5.0, 0.0));
  CHECK(stokes_apply(SpectralVelocityField::zero(box, 5.0)).is_zero());
  check_invariants(stokes_apply(random_divergence_free(box, {9.0, 1.0, 1.0}, 3)));
}

TEST_CASE("Sobolev norms") {
  CHECK(sobolev_norm(SpectralVelocityField::zero(box, 4.0), 1.0) == 0.0);
  const auto u = single_mode(box, 4.0, {1, 0, 0}, {0.0, 1.0, 0.0});
  const double expected = std::sqrt(2.0 * std::pow(2 * pi, 3));  // int (2 cos x)^2
  CHECK(sobolev_norm(u, 0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(22.2733).epsilon(1e-5));
  CHECK(sobolev_norm(u, 1) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(sobolev_norm(u, 2) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(sobolev_norm(u, -1.0), InputError);
}

TEST_CASE("Parseval against physical quadrature") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto u = random_divergence_free(box, {4.0, 1.0, 1.0}, seed);
    const double quad = oracle::box_quadrature(box, 8, [&](const Vec3& x) {
      const Vec3 v = evaluate(u, x);
      return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    });
    const double spec = std::pow(sobolev_norm(u, 0), 2);
    CHECK(std::abs(quad - spec) <= 1e-10 * spec);
  }
}

TEST_CASE("spectral projections") {
  const auto diag = single_mode(box, 4.0, {1, 1, 0}, {0.0, 0.0, 1.0});
  CHECK(galerkin_project(diag, cutoff_for_mode_count(box, 12)).is_zero());
  CHECK(cutoff_for_mode_count(box, 12) == 1.0);
  CHECK(cutoff_for_mode_count(box, 11) == 0.0);
  CHECK(cutoff_for_mode_count(box, 35) == 1.0);  // shell 2 would need 36
  CHECK(cutoff_for_mode_count(box, 36) == 2.0);
  CHECK(real_mode_count(box, 2.0) == 36);

  const auto u = random_divergence_free(box, {16.0, 1.0, 1.0}, 5);
  const auto full = galerkin_project(u, 16.0);
  CHECK(max_diff(full.coefficients(), u.coefficients()) == 0.0);
  for (double cut : {1.0, 3.0, 6.0, 11.0}) {
    const auto p = galerkin_project(u, cut);
    const auto q = tail_project(u, cut);
    CHECK(max_diff((p + q).coefficients(), u.coefficients()) == 0.0);
    const double lhs = std::pow(sobolev_norm(p, 0), 2) + std::pow(sobolev_norm(q, 0), 2);
    const double rhs = std::pow(sobolev_norm(u, 0), 2);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    // A commutes with P.
    CHECK(max_diff(stokes_apply(p).coefficients(),
                   galerkin_project(stokes_apply(u), cut).coefficients()) == 0.0);
  }
}

TEST_CASE("Leray projection is idempotent") {
  const auto u = random_divergence_free(box, {9.0, 1.0, 1.0}, 8);
  std::vector<RawMode> raw;
  const auto wave = u.modes().modes();
  for (std::size_t i = 0; i < wave.size(); ++i) raw.push_back({wave[i], u.coefficients()[i]});
  const auto again = leray_project(raw, box, 9.0);
  CHECK(max_diff(again.coefficients(), u.coefficients()) <= 1e-16 * max_abs(u.coefficients()));
}

TEST_CASE("nonlinear term: trivial cases and Taylor-Green") {
  const auto v = random_divergence_free(box, {4.0, 1.0, 1.0}, 1);
  CHECK(nonlinear_term(SpectralVelocityField::zero(box, 4.0), v).is_zero());
  CHECK(nonlinear_term(v, SpectralVelocityField::zero(box, 4.0)).is_zero());
  const auto tg = taylor_green(box, 9.0);
  CHECK(sobolev_norm(nonlinear_term(tg, tg), 0) <= 1e-12);
  // The unprojected advection of Taylor-Green is a gradient, not zero.
  const auto mode = single_mode(box, 1.0, {1, 0, 0}, {0.0, 1.0, 0.0});
  CHECK(nonlinear_term(mode, mode).is_zero());
  const auto other = SpectralVelocityField::zero(DomainSpec{{1.0, 1.0, 1.0}}, 4.0);
  CHECK_THROWS_AS(nonlinear_term(v, other), InputError);
}

TEST_CASE("nonlinear term matches the direct convolution sum") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto u = random_divergence_free(box, {4.0, 0.5, 1.0}, 100 + seed);
    const auto v = random_divergence_free(box, {4.0, 0.5, 1.0}, 200 + seed);
    const auto b = nonlinear_term(u, v);
    check_invariants(b);
    const auto wave = b.modes().modes();
    const auto ref = oracle::direct_convolution(u, v, {wave.begin(), wave.end()});
    CHECK(max_diff(b.coefficients(), ref) <= 1e-12 * max_abs(ref));
  }
}

TEST_CASE("nonlinear term on a stretched box") {
  const DomainSpec dom{{2 * pi, 3.0, 5.0}};
  const auto u = random_divergence_free(dom, {6.0, 0.5, 1.0}, 1);
  const auto v = random_divergence_free(dom, {6.0, 0.5, 1.0}, 2);
  const auto b = nonlinear_term(u, v, 10.0);
  const auto wave = b.modes().modes();
  const auto ref = oracle::direct_convolution(u, v, {wave.begin(), wave.end()});
  CHECK(max_diff(b.coefficients(), ref) <= 1e-12 * max_abs(ref));
}

TEST_CASE("trilinear forms") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto u = random_divergence_free(box, {4.0, 0.5, 1.0}, 10 + seed);
    const auto v = random_divergence_free(box, {4.0, 0.5, 1.0}, 20 + seed);
    const auto w = random_divergence_free(box, {4.0, 0.5, 1.0}, 30 + seed);
    const double scale = sobolev_norm(u, 1) * sobolev_norm(v, 1) * sobolev_norm(v, 1);
    CHECK(std::abs(trilinear_form(u, v, v)) <= 1e-10 * scale);
    CHECK(std::abs(inner_product(nonlinear_term(u, u, u.cutoff()), u)) <=
          1e-10 * std::pow(sobolev_norm(u, 1), 3));

    const double spectral = trilinear_form(u, v, w);
    const double quad = oracle::box_quadrature(box, 8, [&](const Vec3& x) {
      const auto pu = oracle::evaluate_with_gradient(u, x);
      const auto pv = oracle::evaluate_with_gradient(v, x);
      const auto pw = oracle::evaluate_with_gradient(w, x);
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += pu.u[j] * pv.grad[i][j] * pw.u[i];
      return s;
    });
    CHECK(std::abs(spectral - quad) <= 1e-8 * std::abs(quad));

    const double with_a = trilinear_with_stokes(u, v, w);
    CHECK(with_a == doctest::Approx(trilinear_form(u, v, stokes_apply(w))).epsilon(1e-12));
  }
  const auto z = SpectralVelocityField::zero(box, 4.0);
  const auto v = random_divergence_free(box, {4.0, 0.5, 1.0}, 1);
  CHECK(trilinear_form(z, v, v) == 0.0);
}

TEST_CASE("field files round-trip bit-exactly") {
  for (std::uint64_t seed : {4u, 9u}) {
    const auto u = random_divergence_free(DomainSpec{{2 * pi, 1.5, 0.7}}, {30.0, 1.0, 1.0}, seed);
    std::stringstream s;
    write_field(s, u);
    const auto back = read_field(s);
    CHECK(back.domain() == u.domain());
    CHECK(back.cutoff() == u.cutoff());
    CHECK(max_diff(back.coefficients(), u.coefficients()) == 0.0);
  }
  std::istringstream bad("nsverify-field 2\n");
  CHECK_THROWS_AS(read_field(bad), InputError);
  std::istringstream above(
      "nsverify-field 1\nperiods 6.283185307179586 6.283185307179586 6.283185307179586\n"
      "cutoff 1\nmodes 1\n2 0 0 0 0 1 0 0 0\n");
  CHECK_THROWS_AS(read_field(above), InputError);
  std::istringstream partner(
      "nsverify-field 1\nperiods 6.283185307179586 6.283185307179586 6.283185307179586\n"
      "cutoff 1\nmodes 1\n-1 0 0 0 0 0 1 0 0\n");
  CHECK(read_field(partner).coefficient({1, 0, 0})[1] == std::complex<double>(0, -1));
}
