#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nsverify/errors.hpp"
#include "nsverify/field_presets.hpp"
#include "nsverify/galerkin_solver.hpp"
#include "nsverify/quadrature.hpp"

using namespace nsverify;

namespace {

const DomainSpec box{};

ProblemData unforced(SpectralVelocityField u0, double nu, double T) {
  return ProblemData{std::move(u0), Forcing{}, nu, T};
}

// Divergence and residual-orthogonality invariants at every step / sample.
struct InvariantProbe {
  double worst_divergence = 0.0;
  std::size_t steps = 0;
  StepObserver observer() {
    return [this](double, const SpectralVelocityField& s) {
      worst_divergence = std::max(worst_divergence, s.max_divergence_ratio());
      ++steps;
    };
  }
};

}  // namespace

TEST_CASE("zero data stays zero") {
  const auto traj = integrate(unforced(SpectralVelocityField::zero(box, 9.0), 1.0, 0.1),
                              {9.0, 1e-2, TimeScheme::integrating_factor_rk4, 1});
  REQUIRE(traj.times.size() == 11);
  CHECK(traj.times.back() == 0.1);
  for (const auto& n : traj.norms) {
    CHECK(n.u_l2 == 0.0);
    CHECK(n.du == 0.0);
    CHECK(n.au == 0.0);
    CHECK(n.u_v3 == 0.0);
    CHECK(n.r_v1 == 0.0);
    CHECK(n.r_v2 == 0.0);
  }
}

TEST_CASE("Taylor-Green decays exactly") {
  InvariantProbe probe;
  const auto tg = taylor_green(box, 9.0);
  const auto traj = integrate(unforced(tg, 1.0, 0.1), {9.0, 1e-3}, probe.observer());
  CHECK(probe.steps == 101);
  CHECK(probe.worst_divergence <= 1e-12);
  const double u0 = sobolev_norm(tg, 0);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double exact = std::exp(-2.0 * traj.times[i]) * u0;
    CHECK(std::abs(traj.norms[i].u_l2 - exact) <= 1e-6 * exact);
    CHECK(traj.norms[i].r_v1 <= 1e-12);
    CHECK(sobolev_norm(nonlinear_term(traj.states[i], traj.states[i]), 0) <= 1e-12);
  }
}

TEST_CASE("single forced mode relaxes to f / (nu lambda)") {
  const double nu = 0.5;
  const WaveVector k{1, 1, 0};
  const double lambda = box.eigenvalue(k);
  const auto f = single_mode(box, 4.0, k, {0.0, 0.0, 1.0}, 0.3);
  const double T = 10.0 / (nu * lambda);
  ProblemData data{SpectralVelocityField::zero(box, 4.0), Forcing::constant(f), nu, T};
  const auto traj = integrate(data, {4.0, T / 2000, TimeScheme::integrating_factor_rk4, 100});
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double exact = 0.3 / (nu * lambda) * (1.0 - std::exp(-nu * lambda * traj.times[i]));
    const auto c = traj.states[i].coefficient(k)[2];
    CHECK(std::abs(c.real() - exact) <= 1e-6);
    CHECK(std::abs(c.imag()) <= 1e-15);
  }
  // f lives inside the Galerkin range and B vanishes: zero residual.
  for (const auto& n : traj.norms) CHECK(n.r_v1 <= 1e-14);
}

TEST_CASE("residual") {
  const auto zero = SpectralVelocityField::zero(box, 4.0);
  CHECK(residual(zero, zero, 4.0).is_zero());
  const auto f = single_mode(box, 2.0, {1, 1, 0}, {0.0, 0.0, 1.0});
  CHECK(residual(zero, f, 4.0).is_zero());
  const auto tg = taylor_green(box, 4.0);
  CHECK(sobolev_norm(residual(tg, zero, 4.0), 2) <= 1e-12);
  // State with energy above the cutoff.
  CHECK_THROWS_AS(residual(random_divergence_free(box, {4.0, 1.0, 1.0}, 1), zero, 2.0), InputError);
  // Forcing above the cutoff shows up with a minus sign.
  const auto high = single_mode(box, 9.0, {3, 0, 0}, {0.0, 1.0, 0.0});
  const auto r = residual(SpectralVelocityField::zero(box, 4.0), high, 4.0);
  CHECK(r.coefficient({3, 0, 0})[1] == std::complex<double>(-1.0, 0.0));
}

TEST_CASE("random run: invariants, energy equality, residual orthogonality") {
  const auto u0 = random_divergence_free(box, {4.0, 0.5, 2.0}, 42);
  const double nu = 0.1;
  InvariantProbe probe;
  const auto traj = integrate(unforced(u0, nu, 0.5), {4.0, 1e-3}, probe.observer());
  CHECK(probe.worst_divergence <= 1e-12);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto r = residual(traj.states[i], SpectralVelocityField::zero(box, 4.0), 4.0);
    const double pr = sobolev_norm(galerkin_project(r, 4.0), 0);
    CHECK(pr <= 1e-10 * (1.0 + sobolev_norm(r, 0)));
  }
  // |u(T)|^2 + 2 nu int |Du|^2 = |u(0)|^2
  std::vector<double> enstrophy;
  for (const auto& n : traj.norms) enstrophy.push_back(n.du * n.du);
  const double dissipated =
      2.0 * nu * integrate_samples(traj.times, enstrophy, QuadratureMode::trapezoid);
  const double e0 = std::pow(traj.norms.front().u_l2, 2);
  const double eT = std::pow(traj.norms.back().u_l2, 2);
  CHECK(std::abs(eT + dissipated - e0) <= 1e-6 * e0);
  // The nonlinearity is active in this run.
  CHECK(traj.norms.back().r_v1 > 1e-3);
}

TEST_CASE("integrating-factor RK4 is fourth order") {
  const auto u0 = random_divergence_free(box, {4.0, 0.5, 0.2}, 3);
  const auto f = single_mode(box, 4.0, {0, 1, 1}, {1.0, 0.0, 0.0}, 2.0);
  ProblemData data{u0, Forcing({ForcingTerm{f, TimeEnvelope{EnvelopeKind::sine, 3.0}}}), 0.2, 1.0};
  auto sup_du = [&](double dt) {
    const auto traj = integrate(data, {4.0, dt, TimeScheme::integrating_factor_rk4, 1});
    // Compare on the common coarse grid t = 0, 0.1, ..., 1.
    double sup = 0.0;
    const auto stride = static_cast<std::size_t>(std::lround(0.1 / dt));
    for (std::size_t i = 0; i < traj.times.size(); i += stride) sup = std::max(sup, traj.norms[i].du);
    return std::make_pair(sup, traj.states.back());
  };
  const auto [s1, u1] = sup_du(0.05);
  const auto [s2, u2] = sup_du(0.025);
  const auto [s3, u3] = sup_du(0.0125);
  const double e1 = sobolev_norm(u1 - u2, 1);
  const double e2 = sobolev_norm(u2 - u3, 1);
  MESSAGE("observed order " << std::log2(e1 / e2) << " sup diffs " << std::abs(s1 - s2) << " " << std::abs(s2 - s3));
  CHECK(std::log2(e1 / e2) >= 3.5);
  // The forcing pumps |Du| up, so the sup sits away from t = 0.
  CHECK(std::log2(std::abs(s1 - s2) / std::abs(s2 - s3)) >= 3.5);
}

TEST_CASE("IMEX Euler is first order") {
  const auto tg = taylor_green(box, 4.0);
  auto final_norm = [&](double dt) {
    return integrate(unforced(tg, 1.0, 0.2), {4.0, dt, TimeScheme::imex_euler, 1000}).norms.back().u_l2;
  };
  const double exact = std::exp(-0.4) * sobolev_norm(tg, 0);
  const double e1 = std::abs(final_norm(0.01) - exact);
  const double e2 = std::abs(final_norm(0.005) - exact);
  CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampling grid") {
  const auto tg = taylor_green(box, 4.0);
  const auto traj = integrate(unforced(tg, 1.0, 0.1), {4.0, 0.03, TimeScheme::integrating_factor_rk4, 2});
  // ceil(0.1 / 0.03) = 4 steps of 0.025; samples at steps 0, 2, 4.
  REQUIRE(traj.times.size() == 3);
  CHECK(traj.times[1] == doctest::Approx(0.05));
  CHECK(traj.times.back() == 0.1);
  CHECK_NOTHROW(traj.validate());
}

TEST_CASE("invalid problems and divergence") {
  const auto tg = taylor_green(box, 4.0);
  CHECK_THROWS_AS(integrate(unforced(tg, 0.0, 1.0), {4.0, 0.1}), InputError);
  CHECK_THROWS_AS(integrate(unforced(tg, 1.0, 1.0), {4.0, 2.0}), InputError);
  CHECK_THROWS_AS(integrate(unforced(tg, 1.0, 1.0), {4.0, 0.1, TimeScheme::imex_euler, 0}),
                  InputError);

  const auto wild = random_divergence_free(box, {4.0, 0.0, 1e80}, 1);
  try {
    integrate(unforced(wild, 1e-3, 1.0), {4.0, 0.1});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 1.0);
  }
}

TEST_CASE("convergence study") {
  const auto zero = SpectralVelocityField::zero(box, 9.0);
  for (const auto& row : convergence_study(unforced(zero, 1.0, 0.1), {2.0, 4.0, 9.0}, {9.0, 1e-2})) {
    CHECK(row.sup_diff_v1 == 0.0);
    CHECK(row.sup_diff_v2 == 0.0);
  }
  const auto tg = taylor_green(box, 9.0);
  for (const auto& row : convergence_study(unforced(tg, 1.0, 0.1), {2.0, 4.0, 9.0}, {9.0, 1e-2})) {
    CHECK(row.sup_diff_v1 <= 1e-10);
    CHECK(row.sup_diff_v2 <= 1e-10);
  }
  CHECK_THROWS_AS(convergence_study(unforced(tg, 1.0, 0.1), {4.0}, {9.0, 1e-2}), InputError);
  CHECK_THROWS_AS(convergence_study(unforced(tg, 1.0, 0.1), {4.0, 2.0}, {9.0, 1e-2}), InputError);

  const auto smooth = random_divergence_free(box, {16.0, 4.0, 1.0}, 17);
  const auto rows = convergence_study(unforced(smooth, 1.0, 0.5), {2.0, 5.0, 9.0, 16.0}, {16.0, 1e-2, TimeScheme::integrating_factor_rk4, 5});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].sup_diff_v1 < rows[i - 1].sup_diff_v1);
    CHECK(rows[i].sup_diff_v2 < rows[i - 1].sup_diff_v2);
  }
}
