#pragma once

// Certificates evaluated on trajectory samples.
//
// A-posteriori (minimal):  |D(v(0) - u0)| + int ||r||_1  <  rhs_min(v)
// A-posteriori (second):   ||v(0) - u0||_2 + int ||r||_2 <  rhs_2(v)
// Robustness (minimal):    |D(u0 - v0)| + int |D(f - g)| <  rhs_min(u)
// Robustness (second):     |A(u0 - v0)| + int |A(f - g)| <  rhs_2(u)
//
//   rhs_min(w) = (1/k) (nu^3 / 27T)^{1/4}
//                * exp(-(k^2/2) int [ (27 k^2/2) nu^-3 |Dw|^4 + nu^-1 |Dw||Aw| ])
//   rhs_2(w)   = (1/c) sqrt(2 nu / T) exp(-int (c + c') ||w||_3)
//
// All arithmetic is plain double precision; the report carries a first-order
// rounding sensitivity, not a rigorous enclosure.

#include <string>
#include <vector>

#include "nsverify/galerkin_solver.hpp"
#include "nsverify/inequality_lab.hpp"
#include "nsverify/quadrature.hpp"

namespace nsverify {

enum class CertificateKind {
  minimal_aposteriori,
  second_aposteriori,
  minimal_robustness,
  second_robustness
};

std::string_view to_string(CertificateKind kind);
CertificateKind parse_certificate_kind(std::string_view text);

struct VerificationReport {
  CertificateKind kind = CertificateKind::minimal_aposteriori;
  double lhs = 0.0;
  double rhs = 0.0;
  /// The time integral inside the exponential, without the k^2/2 prefactor
  /// of the minimal certificate.
  double exponent_integral = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool verified = false;
  QuadratureMode quadrature_mode = QuadratureMode::trapezoid;
  lab::ConstantTable constants;
  double nu = 0.0;
  double horizon = 0.0;
  double cutoff = 0.0;
  std::string inputs_digest;
  /// |margin change| when lhs and the exponent are bumped by 1e-12 relative.
  double rounding_sensitivity = 0.0;
  /// "approximation" for a-posteriori checks, "reference" for robustness.
  std::string rhs_trajectory;
  std::vector<std::string> notes;
};

/// JSON rendering (fields in a fixed order, 17 significant digits).
std::string to_json(const VerificationReport& report);

/// Throws InputError unless the samples start at 0 and end at the horizon.
void require_coverage(const Trajectory& traj, double horizon);

struct RhsValue {
  double rhs = 0.0;
  double exponent_integral = 0.0;
};

RhsValue minimal_rhs(const Trajectory& traj, double nu, double horizon,
                     const lab::ConstantTable& constants,
                     QuadratureMode mode = QuadratureMode::trapezoid);

/// Throws ConfigError when c or c' is not configured.
RhsValue second_rhs(const Trajectory& traj, double nu, double horizon,
                    const lab::ConstantTable& constants,
                    QuadratureMode mode = QuadratureMode::trapezoid);

/// |D(v(0) - u0)| + int ||r||_1.  Needs traj.initial_state.
double minimal_lhs_aposteriori(const Trajectory& traj, const ProblemData& data,
                               QuadratureMode mode = QuadratureMode::trapezoid);
/// ||v(0) - u0||_2 + int ||r||_2 (first term unsquared).
double second_lhs_aposteriori(const Trajectory& traj, const ProblemData& data,
                              QuadratureMode mode = QuadratureMode::trapezoid);

VerificationReport verify_minimal(const Trajectory& traj, const ProblemData& data,
                                  const lab::ConstantTable& constants,
                                  QuadratureMode mode = QuadratureMode::trapezoid);
/// Minimal certificate from a bare norm series (du, au, r_v1), e.g. one
/// produced outside the periodic solver; initial_distance is |D(v(0) - u0)|.
VerificationReport verify_minimal_series(const Trajectory& traj, double initial_distance,
                                         double nu, double horizon,
                                         const lab::ConstantTable& constants,
                                         QuadratureMode mode = QuadratureMode::trapezoid);
VerificationReport verify_second(const Trajectory& traj, const ProblemData& data,
                                 const lab::ConstantTable& constants,
                                 QuadratureMode mode = QuadratureMode::trapezoid);

/// Is the problem `pert` close enough to the reference (base_traj, base) to
/// have a strong solution?  Forcing differences are evaluated on the
/// reference sample grid.
VerificationReport robustness_minimal(const Trajectory& base_traj, const ProblemData& base,
                                      const ProblemData& pert,
                                      const lab::ConstantTable& constants,
                                      QuadratureMode mode = QuadratureMode::trapezoid);
VerificationReport robustness_second(const Trajectory& base_traj, const ProblemData& base,
                                     const ProblemData& pert,
                                     const lab::ConstantTable& constants,
                                     QuadratureMode mode = QuadratureMode::trapezoid);

}  // namespace nsverify
