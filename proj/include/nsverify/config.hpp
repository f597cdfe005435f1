#pragma once

// Experiment configuration: a small TOML subset.
//
//   # comment
//   schema = "nsverify-config/1"
//   seed = 42
//   [section]
//   key = 1.5 | "text" | true | [1, 2, 3]
//
// Every key is optional except `schema`; unknown sections and keys are
// errors, reported with the line number.  README.md lists all keys.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nsverify/channel_flow.hpp"
#include "nsverify/galerkin_solver.hpp"
#include "nsverify/inequality_lab.hpp"
#include "nsverify/quadrature.hpp"
#include "nsverify/verifier.hpp"

namespace nsverify {

inline constexpr const char* kConfigSchema = "nsverify-config/1";

/// Named field recipe: zero, taylor-green, single-mode, random-decay.
struct FieldRecipe {
  std::string preset = "zero";
  double amplitude = 1.0;
  WaveVector mode{1, 0, 0};
  Vec3 polarization{0.0, 1.0, 0.0};
  /// Mode-set cutoff of the generated field (default: the solver cutoff).
  std::optional<double> cutoff;
  double decay_exponent = 2.0;
  /// Random substream index below the config seed.
  std::uint64_t stream = 0;
  /// Rescale the result so that |D u| (or |A u|) takes this value.
  std::optional<double> scale_to_du;
  std::optional<double> scale_to_au;

  static FieldRecipe named(std::string preset) {
    FieldRecipe r;
    r.preset = std::move(preset);
    return r;
  }

  SpectralVelocityField build(const DomainSpec& domain, double default_cutoff,
                              std::uint64_t seed) const;
};

struct ForcingRecipe {
  FieldRecipe shape;
  TimeEnvelope envelope;

  Forcing build(const DomainSpec& domain, double default_cutoff, std::uint64_t seed) const;
};

struct RobustnessSpec {
  /// Direction phi of the perturbation; it is normalised in the norm of the
  /// certificate (|D phi| = 1 or |A phi| = 1) and scaled by each magnitude.
  FieldRecipe direction = FieldRecipe::named("single-mode");
  /// "initial" perturbs u0, "forcing" adds a constant body force.
  std::string target = "initial";
  std::vector<double> magnitudes;
  /// Bisection bracket [lo, hi] for the verified/not-verified transition.
  std::optional<std::pair<double, double>> bracket;
  double relative_tolerance = 1e-4;
  int max_iterations = 100;
};

struct LabSpec {
  std::size_t samples = 100;
  double cutoff = 16.0;
  double decay_exponent = 2.0;
};

struct OdeSpec {
  double y0 = 0.0;
  double alpha = 1.0;
  double n_exp = 2.0;
  double horizon = 1.0;
  std::vector<double> times;  // empty: delta = 0 on [0, T]
  std::vector<double> delta;
};

struct ChannelSpec {
  int n = 2;
  channel::ChannelDomain domain{};
  double nu = 1.0;
  double horizon = 1.0;
  int random_sets = 20;
  int oversample = 8;
  double decay_exponent = 2.0;
  /// Optional coefficient file (channel text format) used for the
  /// stationary certificate demo instead of the built-in single mode.
  std::optional<std::filesystem::path> coefficients;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  DomainSpec domain{};
  FieldRecipe initial;
  ForcingRecipe forcing;
  double nu = 1.0;
  double horizon = 1.0;
  SolverConfig solver;
  lab::ConstantTable constants;
  QuadratureMode quadrature = QuadratureMode::trapezoid;
  CertificateKind kind = CertificateKind::minimal_aposteriori;
  RobustnessSpec robustness;
  std::vector<double> sweep_cutoffs;
  LabSpec lab;
  OdeSpec ode;
  ChannelSpec channel;

  /// u0, f, nu, T from the recipes.
  ProblemData problem() const;
};

/// Throws ConfigError ("<source>:<line>: ...") on any syntax or schema error.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace nsverify
