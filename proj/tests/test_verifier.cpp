#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "json.hpp"
#include "nsverify/errors.hpp"
#include "nsverify/field_presets.hpp"
#include "nsverify/verifier.hpp"

using namespace nsverify;

namespace {

const DomainSpec box{};
const double k_default = 72.0 * std::pow(2.0, 0.75);

// Samples on a uniform grid, every functional zero.
Trajectory zero_trajectory(double T, std::size_t intervals = 10, double cutoff = 4.0) {
  Trajectory t;
  t.cutoff = cutoff;
  for (std::size_t i = 0; i <= intervals; ++i)
    t.times.push_back(i == intervals ? T : T * static_cast<double>(i) / intervals);
  t.norms.assign(t.times.size(), NormSample{});
  t.initial_state = SpectralVelocityField::zero(box, cutoff);
  return t;
}

ProblemData zero_problem(double nu, double T) {
  return ProblemData{SpectralVelocityField::zero(box, 4.0), Forcing{}, nu, T};
}

// Single transverse mode at k = (1,0,0) scaled so that |D u| = target.
SpectralVelocityField mode_with_du(double target, double cutoff = 4.0) {
  const auto unit = single_mode(box, cutoff, {1, 0, 0}, {0.0, 1.0, 0.0});
  return (target / sobolev_norm(unit, 1)) * unit;
}

lab::ConstantTable with_c(double c, double c_prime) {
  lab::ConstantTable t;
  t.c_b = c;
  t.c_b_prime = c_prime;
  return t;
}

}  // namespace

TEST_CASE("minimal rhs on the zero trajectory") {
  const lab::ConstantTable k;
  const auto r = minimal_rhs(zero_trajectory(1.0), 1.0, 1.0, k);
  CHECK(r.exponent_integral == 0.0);
  CHECK(r.rhs == doctest::Approx(std::pow(1.0 / 27.0, 0.25) / k_default).epsilon(1e-14));
  CHECK(r.rhs == doctest::Approx(3.6229e-3).epsilon(1e-4));
  const auto r16 = minimal_rhs(zero_trajectory(1.0), 16.0, 1.0, k);
  CHECK(r16.rhs == doctest::Approx(8.0 * r.rhs).epsilon(1e-14));
}

TEST_CASE("minimal rhs, conservative below trapezoid") {
  const auto u0 = random_divergence_free(box, {4.0, 1.0, 0.05}, 8);
  const auto traj = integrate({u0, Forcing{}, 1.0, 1.0}, {4.0, 1e-2, {}, 10});
  const lab::ConstantTable k;
  const auto trap = minimal_rhs(traj, 1.0, 1.0, k, QuadratureMode::trapezoid);
  const auto cons = minimal_rhs(traj, 1.0, 1.0, k, QuadratureMode::conservative);
  CHECK(cons.exponent_integral > trap.exponent_integral);
  CHECK(cons.rhs <= trap.rhs);
}

TEST_CASE("minimal a-posteriori lhs") {
  CHECK(minimal_lhs_aposteriori(zero_trajectory(1.0), zero_problem(1.0, 1.0)) == 0.0);

  // v(0) = P u0 with the tail of u0 dropped and r = 0: lhs = |D Q u0|.
  const auto u0 = random_divergence_free(box, {9.0, 1.0, 1.0}, 4);
  auto traj = zero_trajectory(1.0, 10, 4.0);
  traj.initial_state = with_cutoff(u0, 4.0);
  const ProblemData data{u0, Forcing{}, 1.0, 1.0};
  const double tail = sobolev_norm(tail_project(u0, 4.0), 1);
  CHECK(tail > 0.0);
  CHECK(minimal_lhs_aposteriori(traj, data) == doctest::Approx(tail).epsilon(1e-14));

  // Resolved Taylor-Green run.
  const auto tg = taylor_green(box, 4.0);
  const ProblemData tg_data{tg, Forcing{}, 1.0, 1.0};
  const auto tg_traj = integrate(tg_data, {2.0, 1e-2});
  CHECK(minimal_lhs_aposteriori(tg_traj, tg_data) <= 1e-10);

  auto no_v0 = zero_trajectory(1.0);
  no_v0.initial_state.reset();
  CHECK_THROWS_AS(minimal_lhs_aposteriori(no_v0, zero_problem(1.0, 1.0)), InputError);
}

TEST_CASE("verify_minimal") {
  const lab::ConstantTable k;
  const auto zero = verify_minimal(zero_trajectory(1.0), zero_problem(1.0, 1.0), k);
  CHECK(zero.verified);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.margin == doctest::Approx(3.6229e-3).epsilon(1e-4));
  CHECK(zero.rhs_trajectory == "approximation");

  const ProblemData small{mode_with_du(1e-4), Forcing{}, 1.0, 1.0};
  const auto traj = integrate(small, {4.0, 1e-2});
  const auto r = verify_minimal(traj, small, k);
  CHECK(r.verified);
  CHECK(r.lhs <= 1e-15);
  CHECK(r.exponent_integral <= 1e-6);
  CHECK(r.rhs > 3.6e-3);

  // Coverage of [0, T].
  auto cut = traj;
  cut.times.pop_back();
  cut.norms.pop_back();
  cut.states.pop_back();
  CHECK_THROWS_AS(verify_minimal(cut, small, k), InputError);
  auto late = zero_trajectory(1.0);
  late.times.erase(late.times.begin());
  late.norms.pop_back();
  CHECK_THROWS_AS(verify_minimal(late, zero_problem(1.0, 1.0), k), InputError);
}

TEST_CASE("second rhs") {
  CHECK(second_rhs(zero_trajectory(2.0), 1.0, 2.0, with_c(1.0, 1.0)).rhs ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(second_rhs(zero_trajectory(1.0), 2.0, 1.0, with_c(2.0, 3.0)).rhs ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(second_rhs(zero_trajectory(1.0), 1.0, 1.0, lab::ConstantTable{}), ConfigError);
  auto only_c = lab::ConstantTable{};
  only_c.c_b = 1.0;
  CHECK_THROWS_AS(second_rhs(zero_trajectory(1.0), 1.0, 1.0, only_c), ConfigError);

  // Strictly decreasing in int ||u||_3.
  double previous = INFINITY;
  for (double level : {0.0, 0.1, 0.5, 2.0}) {
    auto traj = zero_trajectory(1.0);
    for (auto& n : traj.norms) n.u_v3 = level;
    const auto r = second_rhs(traj, 1.0, 1.0, with_c(1.0, 2.0));
    CHECK(r.exponent_integral == doctest::Approx(3.0 * level));
    CHECK(r.rhs < previous);
    previous = r.rhs;
  }
}

TEST_CASE("verify_second") {
  const auto constants = with_c(1.0, 1.0);
  const auto zero = verify_second(zero_trajectory(1.0), zero_problem(1.0, 1.0), constants);
  CHECK(zero.verified);
  CHECK(zero.margin == zero.rhs);
  CHECK(zero.rhs > 0.0);
  REQUIRE(zero.notes.size() == 1);
  CHECK(zero.notes[0].find("unsquared") != std::string::npos);

  const ProblemData small{mode_with_du(1e-4), Forcing{}, 1.0, 1.0};
  const auto r = verify_second(integrate(small, {4.0, 1e-2}), small, constants);
  CHECK(r.verified);
  CHECK(r.lhs <= 1e-15);

  CHECK_THROWS_AS(verify_second(zero_trajectory(1.0), zero_problem(1.0, 1.0), lab::ConstantTable{}),
                  ConfigError);
}

TEST_CASE("robustness around the zero solution") {
  const lab::ConstantTable k;
  const auto base = zero_problem(1.0, 1.0);
  const auto traj = zero_trajectory(1.0);

  const auto same = robustness_minimal(traj, base, base, k);
  CHECK(same.lhs == 0.0);
  CHECK(same.verified);
  CHECK(same.rhs_trajectory == "reference");

  const ProblemData near{mode_with_du(1.8e-3), Forcing{}, 1.0, 1.0};
  const auto a = robustness_minimal(traj, base, near, k);
  CHECK(a.lhs == doctest::Approx(1.8e-3).epsilon(1e-14));
  CHECK(a.verified);

  const ProblemData far{mode_with_du(1e-2), Forcing{}, 1.0, 1.0};
  CHECK_FALSE(robustness_minimal(traj, base, far, k).verified);

  // Second order: the threshold is sqrt(2 nu / T) / c = sqrt(2) for c = c' = 1.
  const auto c11 = with_c(1.0, 1.0);
  CHECK(robustness_second(traj, base, base, c11).verified);
  auto with_au = [](double target) {
    const auto unit = single_mode(box, 4.0, {1, 0, 0}, {0.0, 1.0, 0.0});
    return ProblemData{(target / sobolev_norm(unit, 2)) * unit, Forcing{}, 1.0, 1.0};
  };
  const auto inside = robustness_second(traj, base, with_au(1.4), c11);
  CHECK(inside.rhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(inside.verified);
  CHECK_FALSE(robustness_second(traj, base, with_au(1.42), c11).verified);

  const DomainSpec other{{2.0 * M_PI, 2.0 * M_PI, M_PI}};
  const ProblemData elsewhere{SpectralVelocityField::zero(other, 4.0), Forcing{}, 1.0, 1.0};
  CHECK_THROWS_AS(robustness_minimal(traj, base, elsewhere, k), InputError);
}

TEST_CASE("robustness forcing gap") {
  const lab::ConstantTable k;
  const auto base = zero_problem(1.0, 0.5);
  const auto traj = zero_trajectory(0.5, 7);
  const auto g = mode_with_du(2e-3);
  ProblemData pert{SpectralVelocityField::zero(box, 4.0), Forcing::constant(g), 1.0, 0.5};
  const auto r = robustness_minimal(traj, base, pert, k);
  CHECK(r.lhs == doctest::Approx(1e-3).epsilon(1e-13));

  // sin envelope: int_0^T |sin(w t)| with the trapezoid rule on the grid.
  pert.forcing = Forcing({ForcingTerm{g, TimeEnvelope{EnvelopeKind::sine, 2.0}}});
  std::vector<double> gap;
  for (double t : traj.times) gap.push_back(2e-3 * std::abs(std::sin(2.0 * t)));
  const double expected = integrate_samples(traj.times, gap, QuadratureMode::trapezoid);
  CHECK(robustness_minimal(traj, base, pert, k).lhs == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("verdict monotonicity and conservative soundness") {
  const lab::ConstantTable k;
  const auto base = zero_problem(1.0, 1.0);
  for (double scale : {0.5, 1.0, 2.0, 4.0}) {
    bool previous = true;
    for (double size : {1e-4, 1e-3, 3e-3, 3.5e-3, 4e-3, 1e-2}) {
      auto traj = zero_trajectory(1.0, 20);
      for (std::size_t i = 0; i < traj.norms.size(); ++i) {
        traj.norms[i].du = scale * 1e-3 * (1.0 + std::sin(3.0 * traj.times[i]));
        traj.norms[i].au = 2.0 * traj.norms[i].du;
      }
      const ProblemData pert{mode_with_du(size), Forcing{}, 1.0, 1.0};
      const auto trap = robustness_minimal(traj, base, pert, k, QuadratureMode::trapezoid);
      const auto cons = robustness_minimal(traj, base, pert, k, QuadratureMode::conservative);
      if (cons.verified) CHECK(trap.verified);
      if (!previous) CHECK_FALSE(trap.verified);
      previous = trap.verified;

      // Bigger exponent, same lhs.
      auto bigger = traj;
      for (auto& n : bigger.norms) n.du *= 1.5;
      const auto worse = robustness_minimal(bigger, base, pert, k);
      CHECK(worse.exponent_integral > trap.exponent_integral);
      if (!trap.verified) CHECK_FALSE(worse.verified);
    }
  }
}

TEST_CASE("report determinism and JSON layout") {
  const lab::ConstantTable k;
  const ProblemData data{mode_with_du(1e-3), Forcing{}, 1.0, 0.5};
  const auto traj = integrate(data, {4.0, 1e-2});
  const auto a = verify_minimal(traj, data, k);
  const auto b = verify_minimal(integrate(data, {4.0, 1e-2}), data, k);
  CHECK(a.inputs_digest == b.inputs_digest);
  CHECK(to_json(a) == to_json(b));
  CHECK(verify_minimal(traj, data, k, QuadratureMode::conservative).inputs_digest != a.inputs_digest);
  const ProblemData other{mode_with_du(2e-3), Forcing{}, 1.0, 0.5};
  CHECK(verify_minimal(integrate(other, {4.0, 1e-2}), other, k).inputs_digest != a.inputs_digest);
  CHECK(a.rounding_sensitivity < 1e-12 * a.rhs * 10);

  const auto j = nlohmann::json::parse(to_json(a));
  for (const char* key : {"kind", "lhs", "rhs", "exponent_integral", "margin", "verdict",
                          "quadrature_mode", "constants", "nu", "horizon", "cutoff",
                          "inputs_digest"})
    CHECK(j.contains(key));
  CHECK(j["kind"] == "minimal-aposteriori");
  CHECK(j["verdict"] == "verified");
  CHECK(j["quadrature_mode"] == "trapezoid");
  CHECK(j["constants"]["k"].get<double>() == k.k_tri);
  CHECK(j["constants"]["c"].is_null());
  CHECK(j["margin"].get<double>() == a.margin);
}

TEST_CASE("quadrature refinement is second order") {
  const auto u0 = random_divergence_free(box, {4.0, 1.0, 0.5}, 21);
  const ProblemData data{u0, Forcing{}, 1.0, 0.8};
  const lab::ConstantTable k;
  auto at_stride = [&](std::size_t stride) {
    const auto traj = integrate(data, {4.0, 1e-3, {}, stride});
    return std::make_pair(minimal_lhs_aposteriori(traj, data),
                          minimal_rhs(traj, data.nu, data.horizon, k).exponent_integral);
  };
  const auto fine = at_stride(1);
  const auto s40 = at_stride(40);
  const auto s20 = at_stride(20);
  const double order_lhs =
      std::log2(std::abs(s40.first - fine.first) / std::abs(s20.first - fine.first));
  const double order_exp =
      std::log2(std::abs(s40.second - fine.second) / std::abs(s20.second - fine.second));
  MESSAGE("orders " << order_lhs << " " << order_exp);
  CHECK(order_lhs >= 1.8);
  CHECK(order_exp >= 1.8);
}

TEST_CASE("a-posteriori lhs does not grow with the cutoff once the data are resolved") {
  const auto u0 = random_divergence_free(box, {4.0, 1.0, 1.0}, 5);
  const ProblemData data{u0, Forcing{}, 1.0, 0.2};
  double previous = INFINITY;
  for (double cutoff : {4.0, 9.0, 16.0, 25.0}) {
    const double lhs = minimal_lhs_aposteriori(integrate(data, {cutoff, 1e-3, {}, 10}), data);
    MESSAGE("cutoff " << cutoff << " lhs " << lhs);
    CHECK(lhs <= previous + 1e-8);
    previous = lhs;
  }
}
