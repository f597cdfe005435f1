#include "nsverify/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nsverify/errors.hpp"
#include "nsverify/field_io.hpp"
#include "nsverify/field_presets.hpp"
#include "nsverify/ode_bounds.hpp"
#include "nsverify/trajectory_io.hpp"

namespace nsverify {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Context {
  ExperimentConfig cfg;
  QuadratureMode mode;
  CertificateKind kind;
};

Context load(const CommandOptions& opts) {
  if (opts.config.empty()) throw ConfigError("no config file given (--config PATH)");
  Context ctx{load_config(opts.config), QuadratureMode::trapezoid,
              CertificateKind::minimal_aposteriori};
  if (opts.seed) ctx.cfg.seed = *opts.seed;
  ctx.mode = opts.mode.value_or(ctx.cfg.quadrature);
  ctx.kind = opts.kind.value_or(ctx.cfg.kind);
  return ctx;
}

bool is_second(CertificateKind kind) {
  return kind == CertificateKind::second_aposteriori || kind == CertificateKind::second_robustness;
}

void emit(const CommandOptions& opts, const std::string& name, const std::string& contents) {
  write_file_atomic(opts.out / name, contents);
}

std::string field_text(const SpectralVelocityField& f) {
  std::ostringstream s;
  write_field(s, f);
  return s.str();
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

// Runs body, turning exceptions into exit code 1 plus error.json.
int guarded(const char* command, const CommandOptions& opts, std::ostream& log,
            const std::function<int()>& body) {
  std::error_code ec;
  fs::remove(opts.out / "error.json", ec);
  ordered_json err;
  err["schema"] = "nsverify-error/1";
  err["command"] = command;
  try {
    fs::create_directories(opts.out);
    return body();
  } catch (const DivergenceError& e) {
    err["error"] = "divergence";
    err["message"] = e.what();
    err["time"] = number_or_null(e.time());
  } catch (const ConfigError& e) {
    err["error"] = "config";
    err["message"] = e.what();
  } catch (const InputError& e) {
    err["error"] = "input";
    err["message"] = e.what();
  } catch (const std::exception& e) {
    err["error"] = "internal";
    err["message"] = e.what();
  }
  log << "nsverify " << command << ": " << err["error"].get<std::string>()
      << " error: " << err["message"].get<std::string>() << "\n";
  try {
    fs::create_directories(opts.out);
    emit(opts, "error.json", json_text(err));
  } catch (const std::exception&) {
    // the message above is all we can do
  }
  return kExitError;
}

// Reads a trajectory table plus the initial.field stored next to it.
Trajectory load_run(const fs::path& csv, const DomainSpec& domain) {
  Trajectory traj = load_trajectory_csv(csv);
  const fs::path initial = csv.parent_path() / "initial.field";
  if (!fs::exists(initial))
    throw InputError("missing " + initial.string() + " next to the trajectory");
  auto v0 = load_field(initial);
  if (!(v0.domain() == domain))
    throw InputError("trajectory " + csv.string() + " was computed on a different domain");
  traj.cutoff = v0.cutoff();
  traj.initial_state = std::move(v0);
  return traj;
}

std::string verdict(bool verified) { return verified ? "verified" : "not-verified"; }

}  // namespace

// -------------------------------------------------------------------- run

int cmd_run(const CommandOptions& opts, std::ostream& log) {
  return guarded("run", opts, log, [&] {
    const auto ctx = load(opts);
    const auto data = ctx.cfg.problem();
    const auto traj = integrate(data, ctx.cfg.solver);
    emit(opts, "trajectory.csv", trajectory_csv(traj));
    emit(opts, "initial.field", field_text(*traj.initial_state));
    emit(opts, "final.field", field_text(traj.states.back()));
    log << "run: " << traj.times.size() << " samples, " << traj.initial_state->modes().size()
        << " modes, |u(T)| = " << format_real(traj.norms.back().u_l2) << "\n";
    return kExitOk;
  });
}

// ----------------------------------------------------------------- verify

int cmd_verify(const CommandOptions& opts, std::ostream& log) {
  return guarded("verify", opts, log, [&] {
    const auto ctx = load(opts);
    const auto data = ctx.cfg.problem();
    const auto traj =
        load_run(opts.trajectory.value_or(opts.out / "trajectory.csv"), ctx.cfg.domain);
    const auto report = is_second(ctx.kind)
                            ? verify_second(traj, data, ctx.cfg.constants, ctx.mode)
                            : verify_minimal(traj, data, ctx.cfg.constants, ctx.mode);
    emit(opts, "report.json", to_json(report));
    log << "verify: " << verdict(report.verified) << ", margin " << format_real(report.margin)
        << "\n";
    return report.verified ? kExitOk : kExitNegative;
  });
}

// ------------------------------------------------------------- robustness

int cmd_robustness(const CommandOptions& opts, std::ostream& log) {
  return guarded("robustness", opts, log, [&] {
    const auto ctx = load(opts);
    const auto& spec = ctx.cfg.robustness;
    const auto base = ctx.cfg.problem();
    const Trajectory traj = opts.trajectory ? load_run(*opts.trajectory, ctx.cfg.domain)
                                            : integrate(base, ctx.cfg.solver);

    const bool second = is_second(ctx.kind);
    auto phi = spec.direction.build(ctx.cfg.domain, ctx.cfg.solver.cutoff, ctx.cfg.seed);
    const double phi_norm = sobolev_norm(phi, second ? 2 : 1);
    if (!(phi_norm > 0.0)) throw ConfigError("robustness direction has zero norm");
    phi = (1.0 / phi_norm) * phi;

    auto perturbed = [&](double magnitude) {
      ProblemData p = base;
      if (spec.target == "initial") {
        const double c = std::max(p.u0.cutoff(), phi.cutoff());
        p.u0 = with_cutoff(p.u0, c) + magnitude * with_cutoff(phi, c);
      } else {
        auto terms = p.forcing.terms();
        terms.push_back({magnitude * phi, TimeEnvelope{}});
        p.forcing = Forcing(std::move(terms));
      }
      return p;
    };
    auto evaluate = [&](double magnitude) {
      const auto p = perturbed(magnitude);
      return second ? robustness_second(traj, base, p, ctx.cfg.constants, ctx.mode)
                    : robustness_minimal(traj, base, p, ctx.cfg.constants, ctx.mode);
    };

    std::string csv = "magnitude,lhs,rhs,margin,verdict\n";
    for (double m : spec.magnitudes) {
      const auto r = evaluate(m);
      csv += format_real(m) + "," + format_real(r.lhs) + "," + format_real(r.rhs) + "," +
             format_real(r.margin) + "," + verdict(r.verified) + "\n";
    }

    ordered_json j;
    j["schema"] = "nsverify-robustness/1";
    j["kind"] = second ? "second" : "minimal";
    j["target"] = spec.target;
    j["quadrature_mode"] = std::string(to_string(ctx.mode));
    j["direction_norm"] = second ? "|A phi| = 1" : "|D phi| = 1";
    j["reference"] = opts.trajectory ? "file" : "solver";
    j["magnitudes"] = spec.magnitudes.size();
    if (spec.bracket) {
      double lo = spec.bracket->first, hi = spec.bracket->second;
      const auto at_lo = evaluate(lo);
      const auto at_hi = evaluate(hi);
      if (!at_lo.verified || at_hi.verified)
        throw InputError("bracket [" + format_real(lo) + ", " + format_real(hi) +
                         "] does not straddle the verified/not-verified transition");
      int iterations = 0;
      while (hi - lo > spec.relative_tolerance * hi && iterations < spec.max_iterations) {
        const double mid = 0.5 * (lo + hi);
        (evaluate(mid).verified ? lo : hi) = mid;
        ++iterations;
      }
      j["rhs"] = at_lo.rhs;
      j["bisection"] = {{"initial_bracket", {spec.bracket->first, spec.bracket->second}},
                        {"verified_below", lo},
                        {"not_verified_above", hi},
                        {"estimate", 0.5 * (lo + hi)},
                        {"iterations", iterations},
                        {"converged", hi - lo <= spec.relative_tolerance * hi}};
      log << "robustness: transition in [" << format_real(lo) << ", " << format_real(hi)
          << "] after " << iterations << " bisections\n";
    } else {
      j["bisection"] = nullptr;
    }
    emit(opts, "frontier.csv", csv);
    emit(opts, "robustness.json", json_text(j));
    log << "robustness: " << spec.magnitudes.size() << " magnitudes evaluated\n";
    return kExitOk;
  });
}

// ------------------------------------------------------------------ sweep

int cmd_sweep(const CommandOptions& opts, std::ostream& log) {
  return guarded("sweep", opts, log, [&] {
    auto ctx = load(opts);
    const auto cutoffs = opts.cutoffs.empty() ? ctx.cfg.sweep_cutoffs : opts.cutoffs;
    if (cutoffs.size() < 2) throw InputError("a sweep needs at least two cutoffs");
    for (std::size_t i = 0; i < cutoffs.size(); ++i)
      if (!(cutoffs[i] > 0.0) || (i > 0 && !(cutoffs[i] > cutoffs[i - 1])))
        throw InputError("sweep cutoffs must be positive and strictly increasing");

    // Data are generated once, on the finest mode set, and projected per run.
    ctx.cfg.solver.cutoff = cutoffs.back();
    const auto data = ctx.cfg.problem();

    std::vector<Trajectory> runs;
    std::string lhs_csv = "cutoff,modes,lhs,rhs,margin,verdict\n";
    for (double c : cutoffs) {
      SolverConfig sc = ctx.cfg.solver;
      sc.cutoff = c;
      runs.push_back(integrate(data, sc));
      const auto r = is_second(ctx.kind)
                         ? verify_second(runs.back(), data, ctx.cfg.constants, ctx.mode)
                         : verify_minimal(runs.back(), data, ctx.cfg.constants, ctx.mode);
      lhs_csv += format_real(c) + "," + std::to_string(runs.back().initial_state->modes().size()) +
                 "," + format_real(r.lhs) + "," + format_real(r.rhs) + "," +
                 format_real(r.margin) + "," + verdict(r.verified) + "\n";
    }
    std::string conv = "cutoff_low,cutoff_high,sup_diff_v1,sup_diff_v2\n";
    for (const auto& row : convergence_table(runs))
      conv += format_real(row.cutoff_low) + "," + format_real(row.cutoff_high) + "," +
              format_real(row.sup_diff_v1) + "," + format_real(row.sup_diff_v2) + "\n";
    emit(opts, "convergence.csv", conv);
    emit(opts, "sweep_lhs.csv", lhs_csv);
    log << "sweep: " << cutoffs.size() << " cutoffs\n";
    return kExitOk;
  });
}

// -------------------------------------------------------------------- ode

int cmd_ode(const CommandOptions& opts, std::ostream& log) {
  int code = kExitOk;
  const int status = guarded("ode", opts, log, [&] {
    const auto ctx = load(opts);
    const auto& s = ctx.cfg.ode;
    ode::OdeBoundProblem p{s.y0, s.alpha, s.n_exp, s.horizon, s.times, s.delta};
    if (p.times.empty()) {
      p.times = {0.0, p.horizon};
      p.delta = {0.0, 0.0};
    }
    p.validate();
    const double eta = ode::eta(p, ctx.mode);
    const double threshold = ode::boundedness_threshold(p.alpha, p.n_exp, p.horizon);
    const auto result = ode::check(p, ctx.mode);

    ordered_json j;
    j["schema"] = "nsverify-ode/1";
    j["y0"] = p.y0;
    j["alpha"] = p.alpha;
    j["n"] = p.n_exp;
    j["horizon"] = p.horizon;
    j["samples"] = p.times.size();
    j["quadrature_mode"] = std::string(to_string(ctx.mode));
    j["eta"] = eta;
    j["threshold"] = number_or_null(threshold);
    if (const auto* b = std::get_if<ode::Bounded>(&result)) {
      j["result"] = "bounded";
      j["bound"] = b->value;
    } else {
      j["result"] = "inconclusive";
      j["bound"] = nullptr;
      code = kExitNegative;
    }
    emit(opts, "ode_report.json", json_text(j));
    log << "ode: " << j["result"].get<std::string>() << ", eta " << format_real(eta)
        << ", threshold " << format_real(threshold) << "\n";
    return kExitOk;
  });
  return status == kExitOk ? code : status;
}

// -------------------------------------------------------------------- lab

int cmd_lab(const CommandOptions& opts, std::ostream& log) {
  return guarded("lab", opts, log, [&] {
    const auto ctx = load(opts);
    const auto& s = ctx.cfg.lab;
    lab::SamplerSpec spec{s.samples, ctx.cfg.domain, s.cutoff, s.decay_exponent, ctx.cfg.seed};
    const auto report = lab::estimate_constants(spec, ctx.cfg.constants);
    emit(opts, "lab_report.json", lab::to_json(report, ctx.cfg.constants));
    log << "lab: " << s.samples << " samples";
    if (report.max_triform1) log << ", max triform1 ratio " << format_real(*report.max_triform1);
    log << ", " << report.flags.size() << " flags\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------- channel

int cmd_channel(const CommandOptions& opts, std::ostream& log) {
  using namespace channel;
  return guarded("channel", opts, log, [&] {
    const auto ctx = load(opts);
    const auto& s = ctx.cfg.channel;
    const ChannelDomain dom = s.domain;
    dom.validate();
    const OracleGrid grid{s.oversample};

    std::string norms_csv =
        "set,du_oracle,du_verbatim,au_oracle,au_verbatim,l2_oracle,max_imag_ratio\n";
    std::string div_csv = "set,oracle,verbatim\n";
    double max_div = 0.0;
    for (int i = 0; i < s.random_sets; ++i) {
      const auto c = random_channel_coefficients(
          s.n, dom, substream_seed(ctx.cfg.seed, 100 + std::uint64_t(i)), s.decay_exponent);
      const auto nm = channel_norms(c, dom, grid);
      norms_csv += std::to_string(i) + "," + format_real(nm.du_oracle) + "," +
                   format_real(nm.du_verbatim) + "," + format_real(nm.au_oracle) + "," +
                   format_real(nm.au_verbatim) + "," + format_real(nm.l2_oracle) + "," +
                   format_real(nm.max_imag_ratio) + "\n";
      const auto dv = divergence_residual(c, dom, grid);
      max_div = std::max(max_div, dv.oracle);
      div_csv += std::to_string(i) + "," + format_real(dv.oracle) + "," +
                 format_real(dv.verbatim) + "\n";
    }

    // Demo field: the coefficient file, or the first random set.
    ChannelCoefficients demo = random_channel_coefficients(
        s.n, dom, substream_seed(ctx.cfg.seed, 100), s.decay_exponent);
    std::string source = "random";
    if (s.coefficients) {
      std::ifstream in(*s.coefficients);
      if (!in) throw InputError("cannot open channel coefficients " + s.coefficients->string());
      auto [c, file_dom] = read_channel(in);
      if (file_dom.Lx != dom.Lx || file_dom.Lz != dom.Lz)
        throw InputError("channel coefficient file domain differs from [channel] Lx, Lz");
      demo = std::move(c);
      source = "file";
    }
    const auto nl = nonlinear_channel(demo, dom, grid);

    std::vector<ChannelSample> still;
    for (int i = 0; i <= 4; ++i)
      still.push_back({s.horizon * i / 4.0, demo, ChannelCoefficients(demo.n())});
    still.back().t = s.horizon;
    const auto oracle = channel_certificate_inputs(still, dom, s.nu, ChannelEvaluation::oracle, grid);
    const auto closed_form =
        channel_certificate_inputs(still, dom, s.nu, ChannelEvaluation::verbatim, grid);
    std::string cert_csv = "t,du_oracle,au_oracle,r_v1_oracle,du_verbatim,au_verbatim,r_v1_verbatim\n";
    for (std::size_t i = 0; i < still.size(); ++i) {
      const auto& a = oracle.norms[i];
      const auto& b = closed_form.norms[i];
      cert_csv += format_real(oracle.times[i]) + "," + format_real(a.du) + "," +
                  format_real(a.au) + "," + format_real(a.r_v1) + "," + format_real(b.du) + "," +
                  format_real(b.au) + "," + format_real(b.r_v1) + "\n";
    }
    const auto rep_o = verify_minimal_series(oracle, 0.0, s.nu, s.horizon, ctx.cfg.constants, ctx.mode);
    const auto rep_v = verify_minimal_series(closed_form, 0.0, s.nu, s.horizon, ctx.cfg.constants, ctx.mode);

    const auto forcing = channel_forcing(s.n);
    ordered_json fj = ordered_json::array();
    double forcing_err = 0.0;
    for (int k2 = 1; k2 <= s.n; ++k2) {
      const double b = forcing.at({0, k2, 0})[0].real();
      const double expected = k2 % 2 ? 4.0 / (std::numbers::pi * k2) : 0.0;
      forcing_err = std::max(forcing_err, std::abs(b - expected));
      fj.push_back({{"k2", k2}, {"b", b}});
    }

    ordered_json j;
    j["schema"] = "nsverify-channel-report/1";
    j["n"] = s.n;
    j["domain"] = {{"Lx", dom.Lx}, {"Lz", dom.Lz}};
    j["nu"] = s.nu;
    j["horizon"] = s.horizon;
    j["oversample"] = s.oversample;
    j["random_sets"] = s.random_sets;
    j["max_divergence_oracle"] = max_div;
    j["demo_field"] = source;
    j["nonlinear_max_diff"] = nl.max_diff;
    j["nonlinear_modes_compared"] = nl.table.size();
    j["forcing"] = fj;
    j["forcing_max_error"] = forcing_err;
    auto cert = [](const VerificationReport& r) {
      return ordered_json{{"lhs", r.lhs},
                          {"rhs", r.rhs},
                          {"margin", r.margin},
                          {"verdict", r.verified ? "verified" : "not-verified"}};
    };
    j["stationary_certificate"] = {{"oracle", cert(rep_o)}, {"verbatim", cert(rep_v)}};

    emit(opts, "channel_norms.csv", norms_csv);
    emit(opts, "channel_divergence.csv", div_csv);
    emit(opts, "channel_nonlinear.csv", discrepancy_csv(nl.table));
    emit(opts, "channel_certificate.csv", cert_csv);
    emit(opts, "channel_report.json", json_text(j));
    log << "channel: n = " << s.n << ", " << s.random_sets
        << " random sets, nonlinear max discrepancy " << format_real(nl.max_diff) << "\n";
    return kExitOk;
  });
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log) {
  if (name == "run") return cmd_run(opts, log);
  if (name == "verify") return cmd_verify(opts, log);
  if (name == "robustness") return cmd_robustness(opts, log);
  if (name == "sweep") return cmd_sweep(opts, log);
  if (name == "ode") return cmd_ode(opts, log);
  if (name == "lab") return cmd_lab(opts, log);
  if (name == "channel") return cmd_channel(opts, log);
  log << "nsverify: unknown command '" << name << "'\n";
  return kExitError;
}

}  // namespace nsverify
