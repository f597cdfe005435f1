#include "nsverify/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "json.hpp"
#include "nsverify/errors.hpp"

namespace nsverify {

namespace {

constexpr double kBump = 1e-12;

// FNV-1a over the exact bytes of every input that reaches the report.
class Digest {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void number(double x) { bytes(&x, sizeof x); }
  void text(std::string_view s) {
    number(static_cast<double>(s.size()));
    bytes(s.data(), s.size());
  }
  void optional(const std::optional<double>& x) {
    text(x ? "set" : "unset");
    if (x) number(*x);
  }
  void field(const SpectralVelocityField& f) {
    for (double p : f.domain().periods) number(p);
    number(f.cutoff());
    for (const auto& k : f.modes().modes()) bytes(k.data(), sizeof(k));
    for (const auto& c : f.coefficients()) bytes(c.data(), sizeof(c));
  }
  void forcing(const Forcing& f) {
    number(static_cast<double>(f.terms().size()));
    for (const auto& term : f.terms()) {
      number(static_cast<double>(static_cast<int>(term.envelope.kind)));
      number(term.envelope.rate);
      field(term.shape);
    }
  }
  void problem(const ProblemData& d) {
    field(d.u0);
    forcing(d.forcing);
    number(d.nu);
    number(d.horizon);
  }
  void trajectory(const Trajectory& t) {
    number(t.cutoff);
    for (std::size_t i = 0; i < t.times.size(); ++i) {
      const auto& n = t.norms[i];
      for (double v : {t.times[i], n.u_l2, n.du, n.au, n.u_v3, n.r_v1, n.r_v2}) number(v);
    }
    text(t.initial_state ? "v0" : "no-v0");
    if (t.initial_state) field(*t.initial_state);
  }
  void constants(const lab::ConstantTable& c) {
    number(c.c_s);
    number(c.k_tri);
    optional(c.c_b);
    optional(c.c_b_prime);
  }
  std::string hex() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

double integral(const Trajectory& traj, const std::vector<double>& values, QuadratureMode mode) {
  return integrate_samples(traj.times, values, mode);
}

double minimal_prefactor(double nu, double horizon, const lab::ConstantTable& c) {
  return std::pow(nu * nu * nu / (27.0 * horizon), 0.25) / c.k_tri;
}

double second_prefactor(double nu, double horizon, const lab::ConstantTable& c) {
  if (!c.c_b || !c.c_b_prime)
    throw ConfigError("second-order certificates need the constants c and c_prime");
  return std::sqrt(2.0 * nu / horizon) / *c.c_b;
}

double minimal_scale(const lab::ConstantTable& c) { return 0.5 * c.k_tri * c.k_tri; }

// |w - u| in the norm of order m, on the larger of the two mode sets.
double distance(const SpectralVelocityField& w, const SpectralVelocityField& u, int m) {
  if (!(w.domain() == u.domain())) throw InputError("fields live on different domains");
  const double c = std::max(w.cutoff(), u.cutoff());
  return sobolev_norm(with_cutoff(w, c) - with_cutoff(u, c), m);
}

const SpectralVelocityField& initial_state(const Trajectory& traj) {
  if (!traj.initial_state)
    throw InputError("trajectory carries no initial state v(0); the a-posteriori lhs needs it");
  return *traj.initial_state;
}

void check_problem(const ProblemData& data, const Trajectory& traj) {
  data.validate();
  traj.validate();
  require_coverage(traj, data.horizon);
}

// int_0^T |D^m (f - g)| on the reference sample grid, m = 1 (|D|) or 2 (|A|).
double forcing_gap(const Trajectory& grid, const ProblemData& base, const ProblemData& pert,
                   int m, QuadratureMode mode) {
  if (base.forcing.terms().empty() && pert.forcing.terms().empty()) return 0.0;
  const auto& dom = base.u0.domain();
  const double c = std::max(base.forcing.support_cutoff(), pert.forcing.support_cutoff());
  std::vector<double> gap;
  gap.reserve(grid.times.size());
  for (double t : grid.times)
    gap.push_back(sobolev_norm(base.forcing.at(t, dom, c) - pert.forcing.at(t, dom, c), m));
  return integral(grid, gap, mode);
}

VerificationReport finish(CertificateKind kind, double lhs, const RhsValue& rhs, double scale,
                          double prefactor, const Trajectory& traj, double nu, double horizon,
                          const lab::ConstantTable& constants, QuadratureMode mode,
                          Digest digest) {
  VerificationReport r;
  r.kind = kind;
  r.lhs = lhs;
  r.rhs = rhs.rhs;
  r.exponent_integral = rhs.exponent_integral;
  r.margin = r.rhs - r.lhs;
  r.verified = r.margin > 0.0;
  r.quadrature_mode = mode;
  r.constants = constants;
  r.nu = nu;
  r.horizon = horizon;
  r.cutoff = traj.cutoff;
  const double bumped_rhs =
      prefactor * std::exp(-scale * rhs.exponent_integral * (1.0 + kBump));
  r.rounding_sensitivity = std::abs((bumped_rhs - lhs * (1.0 + kBump)) - r.margin);
  digest.text(to_string(kind));
  digest.text(to_string(mode));
  digest.constants(constants);
  digest.trajectory(traj);
  r.inputs_digest = digest.hex();
  return r;
}

}  // namespace

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::minimal_aposteriori: return "minimal-aposteriori";
    case CertificateKind::second_aposteriori: return "second-aposteriori";
    case CertificateKind::minimal_robustness: return "minimal-robustness";
    case CertificateKind::second_robustness: return "second-robustness";
  }
  return "?";
}

CertificateKind parse_certificate_kind(std::string_view text) {
  for (auto k : {CertificateKind::minimal_aposteriori, CertificateKind::second_aposteriori,
                 CertificateKind::minimal_robustness, CertificateKind::second_robustness})
    if (text == to_string(k)) return k;
  // Short forms used on the command line.
  if (text == "minimal") return CertificateKind::minimal_aposteriori;
  if (text == "second") return CertificateKind::second_aposteriori;
  throw InputError("unknown certificate kind '" + std::string(text) + "'");
}

void require_coverage(const Trajectory& traj, double horizon) {
  if (traj.times.empty()) throw InputError("trajectory has no samples");
  if (traj.times.front() != 0.0) throw InputError("trajectory does not start at t = 0");
  if (std::abs(traj.times.back() - horizon) > 1e-12 * horizon)
    throw InputError("trajectory ends at t = " + std::to_string(traj.times.back()) +
                     ", not at the horizon T = " + std::to_string(horizon));
}

RhsValue minimal_rhs(const Trajectory& traj, double nu, double horizon,
                     const lab::ConstantTable& constants, QuadratureMode mode) {
  constants.validate();
  traj.validate();
  require_coverage(traj, horizon);
  const double k2 = constants.k_tri * constants.k_tri;
  std::vector<double> integrand;
  integrand.reserve(traj.norms.size());
  for (const auto& n : traj.norms)
    integrand.push_back(13.5 * k2 * std::pow(n.du, 4) / (nu * nu * nu) + n.du * n.au / nu);
  RhsValue out;
  out.exponent_integral = integral(traj, integrand, mode);
  out.rhs = minimal_prefactor(nu, horizon, constants) *
            std::exp(-minimal_scale(constants) * out.exponent_integral);
  return out;
}

RhsValue second_rhs(const Trajectory& traj, double nu, double horizon,
                    const lab::ConstantTable& constants, QuadratureMode mode) {
  constants.validate();
  const double prefactor = second_prefactor(nu, horizon, constants);
  traj.validate();
  require_coverage(traj, horizon);
  const double cc = *constants.c_b + *constants.c_b_prime;
  std::vector<double> integrand;
  for (const auto& n : traj.norms) integrand.push_back(cc * n.u_v3);
  RhsValue out;
  out.exponent_integral = integral(traj, integrand, mode);
  out.rhs = prefactor * std::exp(-out.exponent_integral);
  return out;
}

double minimal_lhs_aposteriori(const Trajectory& traj, const ProblemData& data,
                               QuadratureMode mode) {
  check_problem(data, traj);
  return distance(initial_state(traj), data.u0, 1) +
         integral(traj, traj.column(&NormSample::r_v1), mode);
}

double second_lhs_aposteriori(const Trajectory& traj, const ProblemData& data,
                              QuadratureMode mode) {
  check_problem(data, traj);
  return distance(initial_state(traj), data.u0, 2) +
         integral(traj, traj.column(&NormSample::r_v2), mode);
}

VerificationReport verify_minimal(const Trajectory& traj, const ProblemData& data,
                                  const lab::ConstantTable& constants, QuadratureMode mode) {
  const double lhs = minimal_lhs_aposteriori(traj, data, mode);
  const auto rhs = minimal_rhs(traj, data.nu, data.horizon, constants, mode);
  Digest d;
  d.problem(data);
  auto r = finish(CertificateKind::minimal_aposteriori, lhs, rhs, minimal_scale(constants),
                  minimal_prefactor(data.nu, data.horizon, constants), traj, data.nu,
                  data.horizon, constants, mode, d);
  r.rhs_trajectory = "approximation";
  return r;
}

VerificationReport verify_minimal_series(const Trajectory& traj, double initial_distance,
                                         double nu, double horizon,
                                         const lab::ConstantTable& constants,
                                         QuadratureMode mode) {
  if (!(initial_distance >= 0.0) || !std::isfinite(initial_distance))
    throw InputError("initial distance must be finite and nonnegative");
  if (!(nu > 0.0) || !(horizon > 0.0)) throw InputError("nu and T must be positive");
  const auto rhs = minimal_rhs(traj, nu, horizon, constants, mode);
  const double lhs = initial_distance + integral(traj, traj.column(&NormSample::r_v1), mode);
  Digest d;
  d.number(initial_distance);
  auto r = finish(CertificateKind::minimal_aposteriori, lhs, rhs, minimal_scale(constants),
                  minimal_prefactor(nu, horizon, constants), traj, nu, horizon, constants, mode,
                  d);
  r.rhs_trajectory = "approximation";
  return r;
}

VerificationReport verify_second(const Trajectory& traj, const ProblemData& data,
                                 const lab::ConstantTable& constants, QuadratureMode mode) {
  const double prefactor = second_prefactor(data.nu, data.horizon, constants);
  const double lhs = second_lhs_aposteriori(traj, data, mode);
  const auto rhs = second_rhs(traj, data.nu, data.horizon, constants, mode);
  Digest d;
  d.problem(data);
  auto r = finish(CertificateKind::second_aposteriori, lhs, rhs, 1.0, prefactor, traj, data.nu,
                  data.horizon, constants, mode, d);
  r.rhs_trajectory = "approximation";
  r.notes.push_back(
      "initial-data term uses the unsquared norm ||v(0) - u0||_2, matching the robustness "
      "condition; the squared form would be smaller whenever the distance is below 1");
  return r;
}

namespace {

VerificationReport robustness(CertificateKind kind, const Trajectory& base_traj,
                              const ProblemData& base, const ProblemData& pert,
                              const lab::ConstantTable& constants, QuadratureMode mode) {
  check_problem(base, base_traj);
  pert.validate();
  if (!(base.u0.domain() == pert.u0.domain()))
    throw InputError("reference and perturbed problems live on different domains");
  const bool second = kind == CertificateKind::second_robustness;
  const int m = second ? 2 : 1;
  const double prefactor = second ? second_prefactor(base.nu, base.horizon, constants)
                                  : minimal_prefactor(base.nu, base.horizon, constants);
  const double lhs = distance(base.u0, pert.u0, m) + forcing_gap(base_traj, base, pert, m, mode);
  const auto rhs = second ? second_rhs(base_traj, base.nu, base.horizon, constants, mode)
                          : minimal_rhs(base_traj, base.nu, base.horizon, constants, mode);
  Digest d;
  d.problem(base);
  d.problem(pert);
  auto r = finish(kind, lhs, rhs, second ? 1.0 : minimal_scale(constants), prefactor, base_traj,
                  base.nu, base.horizon, constants, mode, d);
  r.rhs_trajectory = "reference";
  if (std::any_of(base_traj.norms.begin(), base_traj.norms.end(),
                  [](const NormSample& n) { return n.r_v1 > 0.0; }))
    r.notes.push_back(
        "reference norms come from a Galerkin run with nonzero residual; the reference is "
        "itself only approximate");
  return r;
}

}  // namespace

VerificationReport robustness_minimal(const Trajectory& base_traj, const ProblemData& base,
                                      const ProblemData& pert,
                                      const lab::ConstantTable& constants, QuadratureMode mode) {
  return robustness(CertificateKind::minimal_robustness, base_traj, base, pert, constants, mode);
}

VerificationReport robustness_second(const Trajectory& base_traj, const ProblemData& base,
                                     const ProblemData& pert,
                                     const lab::ConstantTable& constants, QuadratureMode mode) {
  return robustness(CertificateKind::second_robustness, base_traj, base, pert, constants, mode);
}

std::string to_json(const VerificationReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["schema"] = "nsverify-report/1";
  j["kind"] = to_string(r.kind);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["exponent_integral"] = r.exponent_integral;
  j["margin"] = r.margin;
  j["verdict"] = r.verified ? "verified" : "not-verified";
  j["quadrature_mode"] = to_string(r.quadrature_mode);
  j["constants"] = {{"c_s", r.constants.c_s},
                    {"k", r.constants.k_tri},
                    {"c", opt(r.constants.c_b)},
                    {"c_prime", opt(r.constants.c_b_prime)}};
  j["nu"] = r.nu;
  j["horizon"] = r.horizon;
  j["cutoff"] = r.cutoff;
  j["inputs_digest"] = r.inputs_digest;
  j["rounding_sensitivity"] = r.rounding_sensitivity;
  j["rhs_trajectory"] = r.rhs_trajectory;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

}  // namespace nsverify
