// nsverify: command-line front end.  See README.md for the config keys.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "nsverify/commands.hpp"

int main(int argc, char** argv) {
  using namespace nsverify;

  CLI::App app{"Numerical verification of strong solutions for 3D Navier-Stokes"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string config, out = ".", mode, kind, trajectory;
  std::uint64_t seed = 0;

  const std::map<std::string, std::string> help = {
      {"run", "integrate the Galerkin system and write the trajectory"},
      {"verify", "check an a-posteriori certificate on a trajectory"},
      {"robustness", "evaluate the robustness condition over perturbation magnitudes"},
      {"sweep", "convergence table across increasing cutoffs"},
      {"ode", "boundedness check for the scalar differential inequality"},
      {"lab", "sample the functional inequalities on random fields"},
      {"channel", "channel-flow basis checks and discrepancy tables"}};

  std::vector<CLI::App*> subs;
  for (const char* name : {"run", "verify", "robustness", "sweep", "ode", "lab", "channel"}) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--mode", mode, "time quadrature")
        ->check(CLI::IsMember({"trapezoid", "conservative"}));
    sub->add_option("--kind", kind, "certificate kind")->check(CLI::IsMember({"minimal", "second"}));
    sub->add_option("--seed", seed, "override the config seed");
    if (std::string(name) == "verify" || std::string(name) == "robustness")
      sub->add_option("--trajectory", trajectory, "trajectory.csv from a previous run")
          ->check(CLI::ExistingFile);
    if (std::string(name) == "sweep")
      sub->add_option("--cutoffs", opts.cutoffs, "eigenvalue cutoffs, increasing")->delimiter(',');
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  opts.config = config;
  opts.out = out;
  if (!mode.empty()) opts.mode = parse_quadrature_mode(mode);
  if (!kind.empty()) opts.kind = parse_certificate_kind(kind);
  if (!trajectory.empty()) opts.trajectory = trajectory;
  for (auto* sub : subs)
    if (sub->parsed()) {
      if (sub->count("--seed")) opts.seed = seed;
      return run_command(sub->get_name(), opts, std::cerr);
    }
  return kExitError;
}
