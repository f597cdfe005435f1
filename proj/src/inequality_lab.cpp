#include "nsverify/inequality_lab.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "nsverify/errors.hpp"
#include "nsverify/field_presets.hpp"

namespace nsverify::lab {

namespace {

double checked_ratio(double numerator, double denominator, const char* what) {
  if (!(denominator > 0.0)) throw InputError(std::string(what) + ": zero denominator");
  return std::abs(numerator) / denominator;
}

void update_max(std::optional<double>& slot, double value) {
  slot = slot ? std::max(*slot, value) : value;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

ConstantTable ConstantTable::from_sobolev(double c_s) {
  ConstantTable t;
  t.c_s = c_s;
  t.k_tri = 9.0 * std::pow(c_s, 1.5);
  return t;
}

void ConstantTable::validate() const {
  if (!(c_s > 0.0)) throw InputError("c_s must be positive");
  if (!(k_tri > 0.0)) throw InputError("k must be positive");
  if (c_b && !(*c_b > 0.0)) throw InputError("c must be positive");
  if (c_b_prime && !(*c_b_prime > 0.0)) throw InputError("c_prime must be positive");
}

double ratio_triform1(const SpectralVelocityField& u, const SpectralVelocityField& v,
                      const SpectralVelocityField& w) {
  const double denominator = sobolev_norm(u, 1) * std::sqrt(sobolev_norm(v, 1)) *
                             std::sqrt(sobolev_norm(v, 2)) * sobolev_norm(w, 2);
  if (!(denominator > 0.0)) throw InputError("ratio_triform1: zero denominator");
  return checked_ratio(trilinear_with_stokes(u, v, w), denominator, "ratio_triform1");
}

double ratio_triform2(const SpectralVelocityField& u, const SpectralVelocityField& w,
                      SecondOrderForm form) {
  const double denominator = sobolev_norm(u, 3) * std::pow(sobolev_norm(w, 2), 2);
  if (!(denominator > 0.0)) throw InputError("ratio_triform2: zero denominator");
  const auto b = form == SecondOrderForm::wu ? nonlinear_term(w, u, w.cutoff())
                                             : nonlinear_term(u, w, w.cutoff());
  return checked_ratio(inner_product(b, stokes_power(w, 2.0)), denominator, "ratio_triform2");
}

double ratio_b_v2(const SpectralVelocityField& u) {
  const double denominator = sobolev_norm(u, 2) * sobolev_norm(u, 3);
  if (!(denominator > 0.0)) throw InputError("ratio_b_v2: zero denominator");
  return checked_ratio(sobolev_norm(nonlinear_term(u, u), 2), denominator, "ratio_b_v2");
}

EstimateReport estimate_constants(const SamplerSpec& spec, const ConstantTable& constants) {
  constants.validate();
  EstimateReport report;
  report.spec = spec;
  const RandomFieldSpec field_spec{spec.cutoff, spec.decay_exponent, 1.0};
  for (std::size_t s = 0; s < spec.sample_count; ++s) {
    const auto u = random_divergence_free(spec.domain, field_spec, substream_seed(spec.seed, 3 * s));
    const auto v =
        random_divergence_free(spec.domain, field_spec, substream_seed(spec.seed, 3 * s + 1));
    const auto w =
        random_divergence_free(spec.domain, field_spec, substream_seed(spec.seed, 3 * s + 2));
    update_max(report.max_triform1, ratio_triform1(u, v, w));
    update_max(report.max_triform2_wu, ratio_triform2(u, w, SecondOrderForm::wu));
    update_max(report.max_triform2_uw, ratio_triform2(u, w, SecondOrderForm::uw));
    update_max(report.max_b_v2, ratio_b_v2(u));
  }
  if (report.max_triform1 && constants.k_tri < *report.max_triform1)
    report.flags.push_back("k below observed ratio_triform1");
  if (constants.c_b && report.max_triform2_wu && *constants.c_b < *report.max_triform2_wu)
    report.flags.push_back("c below observed ratio_triform2_wu");
  if (constants.c_b && report.max_b_v2 && *constants.c_b < *report.max_b_v2)
    report.flags.push_back("c below observed ratio_b_v2");
  if (constants.c_b_prime && report.max_triform2_uw && *constants.c_b_prime < *report.max_triform2_uw)
    report.flags.push_back("c_prime below observed ratio_triform2_uw");
  return report;
}

std::string to_json(const EstimateReport& report, const ConstantTable& constants) {
  nlohmann::ordered_json j;
  j["schema"] = "nsverify-lab-report/1";
  j["samples"] = report.spec.sample_count;
  j["seed"] = report.spec.seed;
  j["cutoff"] = report.spec.cutoff;
  j["decay_exponent"] = report.spec.decay_exponent;
  j["periods"] = report.spec.domain.periods;
  j["max_ratio_triform1"] = optional_number(report.max_triform1);
  j["max_ratio_triform2_wu"] = optional_number(report.max_triform2_wu);
  j["max_ratio_triform2_uw"] = optional_number(report.max_triform2_uw);
  j["max_ratio_b_v2"] = optional_number(report.max_b_v2);
  j["constants"] = {{"c_s", constants.c_s},
                    {"k", constants.k_tri},
                    {"c", optional_number(constants.c_b)},
                    {"c_prime", optional_number(constants.c_b_prime)}};
  j["flags"] = report.flags;
  return j.dump(2) + "\n";
}

}  // namespace nsverify::lab
