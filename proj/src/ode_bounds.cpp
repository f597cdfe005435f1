#include "nsverify/ode_bounds.hpp"

#include <cmath>
#include <string>

#include "nsverify/errors.hpp"

namespace nsverify::ode {

namespace {

void check_parameters(double alpha, double n_exp, double horizon) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be positive");
  if (!(n_exp > 1.0) || !std::isfinite(n_exp)) throw InputError("exponent n must exceed 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon must be positive");
}

}  // namespace

void OdeBoundProblem::validate() const {
  if (!(y0 >= 0.0) || !std::isfinite(y0)) throw InputError("y0 must be nonnegative");
  check_parameters(alpha, n_exp, horizon);
  if (times.size() != delta.size())
    throw InputError("delta samples and times differ in length");
  if (times.size() < 2) throw InputError("delta needs at least two samples");
  if (times.front() != 0.0) throw InputError("delta samples must start at t = 0");
  // Relative slack on the final time so that grids built by accumulation pass.
  if (std::abs(times.back() - horizon) > 1e-12 * horizon)
    throw InputError("delta samples must end at t = horizon");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(delta[i] >= 0.0) || !std::isfinite(delta[i]))
      throw InputError("delta sample " + std::to_string(i) + " is negative or not finite");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InputError("delta sample times are not strictly increasing");
  }
}

double eta(const OdeBoundProblem& problem, QuadratureMode mode) {
  problem.validate();
  return problem.y0 + integrate_samples(problem.times, problem.delta, mode);
}

double boundedness_threshold(double alpha, double n_exp, double horizon) {
  check_parameters(alpha, n_exp, horizon);
  return 1.0 / std::pow((n_exp - 1.0) * alpha * horizon, 1.0 / (n_exp - 1.0));
}

Envelope envelope_bound(double eta_value, double alpha, double n_exp,
                        double horizon) {
  if (!(eta_value >= 0.0)) throw InputError("eta must be nonnegative");
  check_parameters(alpha, n_exp, horizon);
  if (eta_value == 0.0) return Bounded{0.0};
  const double q = (n_exp - 1.0) * alpha * horizon * std::pow(eta_value, n_exp - 1.0);
  if (!(q < 1.0)) return Blowup{};
  return Bounded{eta_value / std::pow(1.0 - q, 1.0 / (n_exp - 1.0))};
}

CheckResult check(const OdeBoundProblem& problem, QuadratureMode mode) {
  const double e = eta(problem, mode);
  if (!(e < boundedness_threshold(problem.alpha, problem.n_exp, problem.horizon)))
    return Inconclusive{};
  const auto env = envelope_bound(e, problem.alpha, problem.n_exp, problem.horizon);
  if (const auto* b = std::get_if<Bounded>(&env)) return *b;
  return Inconclusive{};
}

}  // namespace nsverify::ode
