#include "nsverify/galerkin_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsverify/errors.hpp"

namespace nsverify {

namespace {

using Coeffs = std::vector<Vec3c>;

// a * x + b * y, modewise.
Coeffs combine(const std::vector<double>& a, const Coeffs& x, double b, const Coeffs& y) {
  Coeffs out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = a[i] * x[i][c] + b * y[i][c];
  return out;
}

Coeffs scaled(const std::vector<double>& a, const Coeffs& x) {
  Coeffs out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i][c] = a[i] * x[i][c];
  return out;
}

bool all_finite(const Coeffs& x) {
  for (const auto& v : x)
    for (const auto& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

class GalerkinRhs {
 public:
  GalerkinRhs(const ProblemData& data, ModeSetPtr modes) : data_(data), modes_(std::move(modes)) {
    if (data.forcing.time_independent())
      constant_forcing_ = data.forcing.at(0.0, modes_->domain(), modes_->cutoff());
  }

  // h * (-P B(u, u) + P f(t))
  Coeffs operator()(const Coeffs& u, double t, double h) const {
    const SpectralVelocityField state(SpectralVelocityField::unchecked_t{}, modes_, u);
    const auto b = nonlinear_term(state, state, modes_->cutoff());
    const auto f = constant_forcing_ ? *constant_forcing_
                                     : data_.forcing.at(t, modes_->domain(), modes_->cutoff());
    Coeffs out(u.size());
    const auto bc = b.coefficients();
    const auto fc = f.coefficients();
    for (std::size_t i = 0; i < u.size(); ++i)
      for (int c = 0; c < 3; ++c) out[i][c] = h * (fc[i][c] - bc[i][c]);
    return out;
  }

 private:
  const ProblemData& data_;
  ModeSetPtr modes_;
  std::optional<SpectralVelocityField> constant_forcing_;
};

NormSample sample_norms(const SpectralVelocityField& state, const ProblemData& data, double t,
                        double cutoff) {
  NormSample s;
  s.u_l2 = sobolev_norm(state, 0);
  s.du = sobolev_norm(state, 1);
  s.au = sobolev_norm(state, 2);
  s.u_v3 = sobolev_norm(state, 3);
  const double out = std::max(product_cutoff(cutoff, cutoff), data.forcing.support_cutoff());
  const auto r = residual(state, data.forcing.at(t, data.u0.domain(), out), cutoff);
  s.r_v1 = sobolev_norm(r, 1);
  s.r_v2 = sobolev_norm(r, 2);
  return s;
}

}  // namespace

// -------------------------------------------------------------- forcing

double TimeEnvelope::value(double t) const {
  switch (kind) {
    case EnvelopeKind::constant: return 1.0;
    case EnvelopeKind::sine: return std::sin(rate * t);
    case EnvelopeKind::cosine: return std::cos(rate * t);
    case EnvelopeKind::exponential: return std::exp(-rate * t);
  }
  return 1.0;
}

Forcing::Forcing(std::vector<ForcingTerm> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 1; i < terms_.size(); ++i)
    if (!(terms_[i].shape.domain() == terms_[0].shape.domain()))
      throw InputError("forcing terms live on different domains");
}

Forcing Forcing::constant(SpectralVelocityField shape) {
  return Forcing({ForcingTerm{std::move(shape), TimeEnvelope{}}});
}

bool Forcing::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const ForcingTerm& t) { return t.shape.is_zero(); });
}

double Forcing::support_cutoff() const {
  double c = 0.0;
  for (const auto& t : terms_) c = std::max(c, t.shape.cutoff());
  return c;
}

bool Forcing::time_independent() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const ForcingTerm& t) {
    return t.envelope.kind == EnvelopeKind::constant;
  });
}

SpectralVelocityField Forcing::at(double t, const DomainSpec& domain, double cutoff) const {
  auto out = SpectralVelocityField::zero(domain, cutoff);
  for (const auto& term : terms_) {
    if (!(term.shape.domain() == domain)) throw InputError("forcing lives on another domain");
    out = out + term.envelope.value(t) * with_cutoff(term.shape, cutoff);
  }
  return out;
}

// ---------------------------------------------------------- validation

void ProblemData::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InputError("viscosity nu must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon T must be positive");
  for (const auto& term : forcing.terms())
    if (!(term.shape.domain() == u0.domain()))
      throw InputError("forcing and initial condition live on different domains");
}

void SolverConfig::validate(double horizon) const {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InputError("solver cutoff must be positive");
  if (!(dt > 0.0) || !(dt <= horizon)) throw InputError("time step must satisfy 0 < dt <= T");
  if (sample_stride < 1) throw InputError("sample stride must be at least 1");
}

std::vector<double> Trajectory::column(double NormSample::*member) const {
  std::vector<double> out;
  out.reserve(norms.size());
  for (const auto& n : norms) out.push_back(n.*member);
  return out;
}

void Trajectory::validate() const {
  if (times.empty()) throw InputError("trajectory has no samples");
  if (norms.size() != times.size()) throw InputError("trajectory columns differ in length");
  if (!states.empty() && states.size() != times.size())
    throw InputError("trajectory states differ in length from times");
  if (times.front() != 0.0) throw InputError("trajectory does not start at t = 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InputError("trajectory times are not strictly increasing");
    const auto& n = norms[i];
    for (double v : {n.u_l2, n.du, n.au, n.u_v3, n.r_v1, n.r_v2})
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InputError("trajectory functional at sample " + std::to_string(i) +
                         " is negative or not finite");
  }
}

// ------------------------------------------------------------ residual

SpectralVelocityField residual(const SpectralVelocityField& state,
                               const SpectralVelocityField& f_t, double cutoff) {
  if (!(state.domain() == f_t.domain()))
    throw InputError("residual: state and forcing live on different domains");
  if (!tail_project(state, cutoff).is_zero())
    throw InputError("residual: state has modes above the Galerkin cutoff");
  const double out = std::max(product_cutoff(cutoff, cutoff), f_t.cutoff());
  const auto b = nonlinear_term(state, state, out);
  return tail_project(b - with_cutoff(f_t, out), cutoff);
}

// ---------------------------------------------------------- integrator

Trajectory integrate(const ProblemData& data, const SolverConfig& config,
                     const StepObserver& observer) {
  data.validate();
  config.validate(data.horizon);
  const double T = data.horizon;
  long steps = std::max(1L, std::lround(T / config.dt));
  if (std::abs(steps * config.dt - T) > 1e-9 * T)
    steps = static_cast<long>(std::ceil(T / config.dt));
  const double h = T / static_cast<double>(steps);

  auto modes = ModeSet::make(data.u0.domain(), config.cutoff);
  const auto initial = with_cutoff(data.u0, config.cutoff);
  Coeffs u(initial.coefficients().begin(), initial.coefficients().end());

  const auto lambda = modes->eigenvalues();
  std::vector<double> half(lambda.size()), full(lambda.size()), implicit(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    half[i] = std::exp(-data.nu * lambda[i] * 0.5 * h);
    full[i] = half[i] * half[i];
    implicit[i] = 1.0 / (1.0 + data.nu * lambda[i] * h);
  }
  const std::vector<double> ones(lambda.size(), 1.0);
  const GalerkinRhs rhs(data, modes);

  Trajectory traj;
  traj.cutoff = config.cutoff;
  traj.initial_state = initial;
  auto record = [&](double t) {
    SpectralVelocityField state(SpectralVelocityField::unchecked_t{}, modes, u);
    traj.times.push_back(t);
    traj.norms.push_back(sample_norms(state, data, t, config.cutoff));
    traj.states.push_back(std::move(state));
  };
  record(0.0);
  if (observer) observer(0.0, traj.states.back());

  for (long s = 0; s < steps; ++s) {
    const double t = s * h;
    if (config.scheme == TimeScheme::integrating_factor_rk4) {
      // Lawson integrating-factor RK4 with E = exp(-nu lambda h / 2).
      const Coeffs k1 = rhs(u, t, h);
      const Coeffs k2 = rhs(scaled(half, combine(ones, u, 0.5, k1)), t + 0.5 * h, h);
      const Coeffs k3 = rhs(combine(half, u, 0.5, k2), t + 0.5 * h, h);
      const Coeffs k4 = rhs(combine(full, u, 1.0, scaled(half, k3)), t + h, h);
      Coeffs next(u.size());
      for (std::size_t i = 0; i < u.size(); ++i)
        for (int d = 0; d < 3; ++d)
          next[i][d] = full[i] * u[i][d] +
                       (full[i] * k1[i][d] + 2.0 * half[i] * (k2[i][d] + k3[i][d]) + k4[i][d]) / 6.0;
      u = std::move(next);
    } else {
      const Coeffs k1 = rhs(u, t, h);
      u = scaled(implicit, combine(ones, u, 1.0, k1));
    }
    const bool last = s + 1 == steps;
    const double t_next = last ? T : (s + 1) * h;
    if (!all_finite(u))
      throw DivergenceError(t_next, "Galerkin state became non-finite at t = " +
                                        std::to_string(t_next));
    if (last || (s + 1) % static_cast<long>(config.sample_stride) == 0) {
      record(t_next);
      if (observer) observer(t_next, traj.states.back());
    } else if (observer) {
      observer(t_next, SpectralVelocityField(SpectralVelocityField::unchecked_t{}, modes, u));
    }
  }
  return traj;
}

// ---------------------------------------------------------- convergence

std::vector<ConvergenceRow> convergence_table(const std::vector<Trajectory>& runs) {
  if (runs.size() < 2) throw InputError("convergence study needs at least two cutoffs");
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const auto& lo = runs[i];
    const auto& hi = runs[i + 1];
    if (lo.times != hi.times) throw InputError("convergence runs have different sample times");
    if (lo.states.size() != lo.times.size() || hi.states.size() != hi.times.size())
      throw InputError("convergence runs need stored states");
    ConvergenceRow row{lo.cutoff, hi.cutoff, 0.0, 0.0};
    for (std::size_t s = 0; s < lo.times.size(); ++s) {
      const auto diff = hi.states[s] - with_cutoff(lo.states[s], hi.cutoff);
      row.sup_diff_v1 = std::max(row.sup_diff_v1, sobolev_norm(diff, 1));
      row.sup_diff_v2 = std::max(row.sup_diff_v2, sobolev_norm(diff, 2));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study(const ProblemData& data,
                                              const std::vector<double>& cutoffs,
                                              const SolverConfig& config) {
  if (cutoffs.size() < 2) throw InputError("convergence study needs at least two cutoffs");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (!(cutoffs[i] > cutoffs[i - 1])) throw InputError("cutoffs must increase strictly");
  std::vector<Trajectory> runs;
  for (double c : cutoffs) {
    SolverConfig cfg = config;
    cfg.cutoff = c;
    runs.push_back(integrate(data, cfg));
  }
  return convergence_table(runs);
}

}  // namespace nsverify
