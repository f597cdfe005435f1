#pragma once

// Subcommands of the nsverify tool as library calls.  Each one loads the
// config, applies the command-line overrides, writes its artifacts into the
// output directory (atomically, no timestamps) and returns the exit code.
// On failure an error record error.json is written next to the artifacts.
//
//   run         trajectory.csv, initial.field, final.field
//   verify      report.json              (0 verified, 2 not verified)
//   robustness  frontier.csv, robustness.json
//   sweep       convergence.csv, sweep_lhs.csv
//   ode         ode_report.json          (0 bounded, 2 inconclusive)
//   lab         lab_report.json
//   channel     channel_norms.csv, channel_divergence.csv,
//               channel_nonlinear.csv, channel_certificate.csv, channel_report.json

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsverify/config.hpp"

namespace nsverify {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<QuadratureMode> mode;
  std::optional<CertificateKind> kind;
  std::optional<std::uint64_t> seed;
  /// Existing trajectory.csv (verify, robustness); default <out>/trajectory.csv
  /// for verify, a fresh solver run for robustness.
  std::optional<std::filesystem::path> trajectory;
  /// Overrides [sweep] cutoffs.
  std::vector<double> cutoffs;
};

int cmd_run(const CommandOptions& opts, std::ostream& log);
int cmd_verify(const CommandOptions& opts, std::ostream& log);
int cmd_robustness(const CommandOptions& opts, std::ostream& log);
int cmd_sweep(const CommandOptions& opts, std::ostream& log);
int cmd_ode(const CommandOptions& opts, std::ostream& log);
int cmd_lab(const CommandOptions& opts, std::ostream& log);
int cmd_channel(const CommandOptions& opts, std::ostream& log);

/// Dispatch by subcommand name; unknown names return kExitError.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log);

}  // namespace nsverify
