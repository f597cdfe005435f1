#pragma once

// Boundedness test for scalar differential inequalities of the form
//
//     dy/dt <= delta(t) + alpha * y^n,   y(0) = y0,
//
// on [0, T].  With eta = y0 + int_0^T delta, the solution stays bounded when
// eta < [(n-1) alpha T]^{-1/(n-1)}, and then
//
//     y(t) <= eta / (1 - (n-1) alpha T eta^{n-1})^{1/(n-1)}.
//
// Failing the condition is inconclusive: it is never reported as blow-up.

#include <variant>
#include <vector>

#include "nsverify/quadrature.hpp"

namespace nsverify::ode {

struct OdeBoundProblem {
  double y0 = 0.0;
  double alpha = 1.0;
  double n_exp = 2.0;
  double horizon = 1.0;
  /// Samples of delta; times[0] == 0 and times.back() == horizon.
  std::vector<double> times;
  std::vector<double> delta;

  /// Throws InputError when any invariant is violated.
  void validate() const;
};

struct Bounded {
  double value = 0.0;
  bool operator==(const Bounded&) const = default;
};
struct Blowup {
  bool operator==(const Blowup&) const = default;
};
struct Inconclusive {
  bool operator==(const Inconclusive&) const = default;
};

using Envelope = std::variant<Bounded, Blowup>;
using CheckResult = std::variant<Bounded, Inconclusive>;

/// y0 plus the quadrature of delta over [0, T].
double eta(const OdeBoundProblem& problem,
           QuadratureMode mode = QuadratureMode::trapezoid);

/// 1 / [(n-1) alpha T]^{1/(n-1)}.
double boundedness_threshold(double alpha, double n_exp, double horizon);

/// Value of the comparison solution z(T) with z(0) = eta, or Blowup if the
/// denominator is not positive.
Envelope envelope_bound(double eta_value, double alpha, double n_exp,
                        double horizon);

CheckResult check(const OdeBoundProblem& problem,
                  QuadratureMode mode = QuadratureMode::trapezoid);

}  // namespace nsverify::ode
