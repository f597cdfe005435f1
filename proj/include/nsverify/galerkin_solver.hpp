#pragma once

// Time integration of the Galerkin system
//
//     du_n/dt + nu A u_n + P_n B(u_n, u_n) = P_n f(t),   u_n(0) = P_n u_0,
//
// on the periodic box, with P_n the eigenvalue cutoff projection.  The
// residual of an exact Galerkin trajectory is Q_n[B(u_n, u_n) - f], so it is
// evaluated from the state alone, never by differencing in time.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "nsverify/spectral_field.hpp"

namespace nsverify {

enum class EnvelopeKind { constant, sine, cosine, exponential };

/// Scalar time profile: 1, sin(rate t), cos(rate t) or exp(-rate t).
struct TimeEnvelope {
  EnvelopeKind kind = EnvelopeKind::constant;
  double rate = 0.0;

  double value(double t) const;
};

struct ForcingTerm {
  SpectralVelocityField shape;
  TimeEnvelope envelope;
};

/// f(t) = sum_i envelope_i(t) shape_i.  An empty term list is f = 0.
class Forcing {
 public:
  Forcing() = default;
  explicit Forcing(std::vector<ForcingTerm> terms);
  static Forcing constant(SpectralVelocityField shape);

  const std::vector<ForcingTerm>& terms() const { return terms_; }
  bool is_zero() const;
  /// Largest cutoff among the term shapes (0 when empty).
  double support_cutoff() const;
  /// f(t) on the mode set with the given cutoff (modes above it dropped).
  SpectralVelocityField at(double t, const DomainSpec& domain, double cutoff) const;
  bool time_independent() const;

 private:
  std::vector<ForcingTerm> terms_;
};

struct ProblemData {
  SpectralVelocityField u0;
  Forcing forcing;
  double nu = 1.0;
  double horizon = 1.0;

  void validate() const;
};

enum class TimeScheme { integrating_factor_rk4, imex_euler };

struct SolverConfig {
  double cutoff = 9.0;
  double dt = 1e-3;
  TimeScheme scheme = TimeScheme::integrating_factor_rk4;
  std::size_t sample_stride = 1;

  void validate(double horizon) const;
};

/// Norm functionals of one stored sample; r is the Galerkin residual.
struct NormSample {
  double u_l2 = 0.0;  // |u_n|
  double du = 0.0;    // |D u_n|
  double au = 0.0;    // |A u_n|
  double u_v3 = 0.0;  // ||u_n||_3
  double r_v1 = 0.0;  // ||r||_1
  double r_v2 = 0.0;  // ||r||_2
};

struct Trajectory {
  double cutoff = 0.0;
  std::vector<double> times;
  std::vector<NormSample> norms;
  /// Stored states (one per time); empty for trajectories read from CSV.
  std::vector<SpectralVelocityField> states;
  /// v(0), needed by the a-posteriori checks.
  std::optional<SpectralVelocityField> initial_state;

  std::vector<double> column(double NormSample::*member) const;
  /// Throws InputError unless times start at 0, increase strictly, and all
  /// functionals are finite and nonnegative.
  void validate() const;
};

/// Called at t = 0 and after every time step.
using StepObserver = std::function<void(double t, const SpectralVelocityField& state)>;

/// Integrates the Galerkin system.  The step is adjusted down to T / N with
/// N = ceil(T / dt) (or round(T / dt) when dt divides T to 1e-9).  Samples
/// are stored every sample_stride steps and at T.  Throws DivergenceError
/// carrying the step end time when the state becomes non-finite.
Trajectory integrate(const ProblemData& data, const SolverConfig& config,
                     const StepObserver& observer = {});

/// Q_n[B(state, state) - f_t] on the exact support of the product.  Throws
/// InputError when state has energy above the cutoff.
SpectralVelocityField residual(const SpectralVelocityField& state,
                               const SpectralVelocityField& f_t, double cutoff);

struct ConvergenceRow {
  double cutoff_low = 0.0;
  double cutoff_high = 0.0;
  double sup_diff_v1 = 0.0;  // sup_t ||u_high - u_low||_1
  double sup_diff_v2 = 0.0;  // sup_t ||u_high - u_low||_2
};

/// Pairwise differences of trajectories at consecutive cutoffs (config.cutoff
/// is ignored).  Needs at least two strictly increasing cutoffs.
std::vector<ConvergenceRow> convergence_study(const ProblemData& data,
                                              const std::vector<double>& cutoffs,
                                              const SolverConfig& config);
/// Same, reusing trajectories computed at the listed cutoffs.
std::vector<ConvergenceRow> convergence_table(const std::vector<Trajectory>& runs);

}  // namespace nsverify
