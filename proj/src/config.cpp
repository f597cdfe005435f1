#include "nsverify/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nsverify/errors.hpp"
#include "nsverify/field_presets.hpp"

namespace nsverify {

namespace {

struct Value {
  enum class Type { number, text, boolean, array } type = Type::number;
  double number = 0.0;
  bool integral = false;
  std::string text;
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

struct Entry {
  Value value;
  bool used = false;
};

struct RawSection {
  int line = 0;
  std::map<std::string, Entry> entries;
};

const std::set<std::string> kSections = {"",       "domain",     "initial", "forcing", "problem",
                                         "solver", "constants",  "verify",  "robustness",
                                         "sweep",  "lab",        "ode",     "channel"};

class Parser {
 public:
  Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  std::map<std::string, RawSection> parse(const std::string& text) {
    std::map<std::string, RawSection> out;
    out[""].line = 1;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string body = trim(strip_comment(line, lineno));
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') fail(lineno, "malformed section header");
        current = trim(body.substr(1, body.size() - 2));
        if (!kSections.count(current) || current.empty())
          fail(lineno, "unknown section [" + current + "]");
        if (out.count(current)) fail(lineno, "duplicate section [" + current + "]");
        out[current].line = lineno;
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
      const std::string key = trim(body.substr(0, eq));
      if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                               "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
                             std::string::npos)
        fail(lineno, "invalid key '" + key + "'");
      auto& section = out[current];
      if (section.entries.count(key)) fail(lineno, "duplicate key '" + key + "'");
      section.entries[key].value = parse_value(trim(body.substr(eq + 1)), lineno);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::string strip_comment(const std::string& s, int lineno) const {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && quoted) {
        ++i;
        continue;
      }
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    if (quoted) fail(lineno, "unterminated string");
    return s;
  }

  Value parse_value(const std::string& s, int lineno) const {
    if (s.empty()) fail(lineno, "missing value");
    if (s.front() == '[') {
      if (s.back() != ']') fail(lineno, "unterminated array");
      Value v;
      v.type = Value::Type::array;
      v.line = lineno;
      const std::string inner = trim(s.substr(1, s.size() - 2));
      if (inner.empty()) return v;
      std::string item;
      bool quoted = false;
      for (char ch : inner + ",") {
        if (ch == '"') quoted = !quoted;
        if (ch == ',' && !quoted) {
          const auto t = trim(item);
          if (t.empty()) fail(lineno, "empty array element");
          if (t.front() == '[') fail(lineno, "nested arrays are not supported");
          v.items.push_back(parse_value(t, lineno));
          item.clear();
        } else {
          item += ch;
        }
      }
      return v;
    }
    Value v;
    v.line = lineno;
    if (s.front() == '"') {
      if (s.size() < 2 || s.back() != '"') fail(lineno, "malformed string");
      v.type = Value::Type::text;
      for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] == '\\' && i + 2 < s.size()) ++i;
        else if (s[i] == '"') fail(lineno, "unexpected quote inside string");
        v.text += s[i];
      }
      return v;
    }
    if (s == "true" || s == "false") {
      v.type = Value::Type::boolean;
      v.boolean = s == "true";
      return v;
    }
    errno = 0;
    char* end = nullptr;
    v.number = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v.number))
      fail(lineno, "cannot parse value '" + s + "'");
    v.integral = s.find_first_of(".eE") == std::string::npos;
    return v;
  }

  std::string source_;
};

// Typed access to one section; remembers which keys were read.
class Section {
 public:
  Section(const Parser& parser, std::string name, RawSection* raw)
      : parser_(parser), name_(std::move(name)), raw_(raw) {}

  bool present() const { return raw_ != nullptr; }

  std::optional<double> number(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->type != Value::Type::number) bad(*v, key, "expected a number");
    return v->number;
  }
  std::optional<long long> integer(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->type != Value::Type::number || !v->integral) bad(*v, key, "expected an integer");
    return static_cast<long long>(v->number);
  }
  std::optional<std::string> text(const std::string& key) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->type != Value::Type::text) bad(*v, key, "expected a quoted string");
    return v->text;
  }
  std::optional<std::vector<double>> numbers(const std::string& key, std::size_t exact = 0) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->type != Value::Type::array) bad(*v, key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : v->items) {
      if (item.type != Value::Type::number) bad(*v, key, "expected an array of numbers");
      out.push_back(item.number);
    }
    if (exact && out.size() != exact)
      bad(*v, key, "expected " + std::to_string(exact) + " entries");
    return out;
  }
  std::optional<std::vector<long long>> integers(const std::string& key, std::size_t exact) {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    std::vector<long long> out;
    if (v->type == Value::Type::array)
      for (const auto& item : v->items) {
        if (item.type != Value::Type::number || !item.integral)
          bad(*v, key, "expected an array of integers");
        out.push_back(static_cast<long long>(item.number));
      }
    if (v->type != Value::Type::array || out.size() != exact)
      bad(*v, key, "expected an array of " + std::to_string(exact) + " integers");
    return out;
  }

  /// Throws for the first key nobody asked for.
  void finish() const {
    if (!raw_) return;
    for (const auto& [key, entry] : raw_->entries)
      if (!entry.used) bad(entry.value, key, "unknown key");
  }

  [[noreturn]] void bad(const Value& v, const std::string& key, const std::string& msg) const {
    parser_.fail(v.line, (name_.empty() ? key : name_ + "." + key) + ": " + msg);
  }
  [[noreturn]] void bad_key(const std::string& key, const std::string& msg) {
    const Value* v = find(key);
    parser_.fail(v ? v->line : (raw_ ? raw_->line : 0),
                 (name_.empty() ? key : name_ + "." + key) + ": " + msg);
  }

 private:
  const Value* find(const std::string& key) {
    if (!raw_) return nullptr;
    auto it = raw_->entries.find(key);
    if (it == raw_->entries.end()) return nullptr;
    it->second.used = true;
    return &it->second.value;
  }

  const Parser& parser_;
  std::string name_;
  RawSection* raw_;
};

void require(bool ok, Section& s, const std::string& key, const std::string& msg) {
  if (!ok) s.bad_key(key, msg);
}

FieldRecipe read_recipe(Section& s, FieldRecipe r) {
  if (auto v = s.text("preset")) r.preset = *v;
  if (r.preset != "zero" && r.preset != "taylor-green" && r.preset != "single-mode" &&
      r.preset != "random-decay")
    s.bad_key("preset", "unknown preset '" + r.preset +
                            "' (zero, taylor-green, single-mode, random-decay)");
  if (auto v = s.number("amplitude")) r.amplitude = *v;
  if (auto v = s.integers("mode", 3)) r.mode = {int((*v)[0]), int((*v)[1]), int((*v)[2])};
  if (auto v = s.numbers("polarization", 3)) r.polarization = {(*v)[0], (*v)[1], (*v)[2]};
  if (auto v = s.number("cutoff")) {
    require(*v > 0.0, s, "cutoff", "must be positive");
    r.cutoff = *v;
  }
  if (auto v = s.number("decay_exponent")) r.decay_exponent = *v;
  if (auto v = s.integer("stream")) {
    require(*v >= 0, s, "stream", "must be nonnegative");
    r.stream = static_cast<std::uint64_t>(*v);
  }
  if (auto v = s.number("scale_to_du")) {
    require(*v >= 0.0, s, "scale_to_du", "must be nonnegative");
    r.scale_to_du = *v;
  }
  if (auto v = s.number("scale_to_au")) {
    require(*v >= 0.0, s, "scale_to_au", "must be nonnegative");
    r.scale_to_au = *v;
  }
  if (r.scale_to_du && r.scale_to_au) s.bad_key("scale_to_au", "conflicts with scale_to_du");
  return r;
}

EnvelopeKind parse_envelope(Section& s, const std::string& name) {
  if (name == "constant") return EnvelopeKind::constant;
  if (name == "sine") return EnvelopeKind::sine;
  if (name == "cosine") return EnvelopeKind::cosine;
  if (name == "exponential") return EnvelopeKind::exponential;
  s.bad_key("envelope", "unknown envelope '" + name + "' (constant, sine, cosine, exponential)");
}

TimeScheme parse_scheme(Section& s, const std::string& name) {
  if (name == "if-rk4") return TimeScheme::integrating_factor_rk4;
  if (name == "imex-euler") return TimeScheme::imex_euler;
  s.bad_key("scheme", "unknown scheme '" + name + "' (if-rk4, imex-euler)");
}

}  // namespace

// ----------------------------------------------------------------- recipes

SpectralVelocityField FieldRecipe::build(const DomainSpec& domain, double default_cutoff,
                                         std::uint64_t seed) const {
  const double c = cutoff.value_or(default_cutoff);
  SpectralVelocityField f = SpectralVelocityField::zero(domain, c);
  if (preset == "taylor-green") {
    f = taylor_green(domain, c, amplitude);
  } else if (preset == "single-mode") {
    f = single_mode(domain, c, mode, {polarization[0], polarization[1], polarization[2]},
                    amplitude);
  } else if (preset == "random-decay") {
    f = random_divergence_free(domain, {c, decay_exponent, amplitude},
                               substream_seed(seed, stream));
  } else if (preset != "zero") {
    throw ConfigError("unknown field preset '" + preset + "'");
  }
  auto rescale = [&](int m, double target) {
    const double n = sobolev_norm(f, m);
    if (!(n > 0.0)) throw ConfigError("cannot rescale a zero field to a nonzero norm");
    f = (target / n) * f;
  };
  if (scale_to_du) rescale(1, *scale_to_du);
  if (scale_to_au) rescale(2, *scale_to_au);
  return f;
}

Forcing ForcingRecipe::build(const DomainSpec& domain, double default_cutoff,
                             std::uint64_t seed) const {
  if (shape.preset == "zero") return Forcing{};
  return Forcing({ForcingTerm{shape.build(domain, default_cutoff, seed), envelope}});
}

ProblemData ExperimentConfig::problem() const {
  ProblemData d{initial.build(domain, solver.cutoff, seed),
                forcing.build(domain, solver.cutoff, seed), nu, horizon};
  d.validate();
  return d;
}

// ------------------------------------------------------------------ parser

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Parser parser(source);
  auto raw = parser.parse(text);
  auto section = [&](const std::string& name) {
    auto it = raw.find(name);
    return Section(parser, name, it == raw.end() ? nullptr : &it->second);
  };

  ExperimentConfig cfg;
  {
    auto top = section("");
    const auto schema = top.text("schema");
    if (!schema) parser.fail(1, std::string("missing schema = \"") + kConfigSchema + "\"");
    if (*schema != kConfigSchema)
      top.bad_key("schema", "unsupported schema '" + *schema + "', expected " + kConfigSchema);
    if (auto v = top.integer("seed")) {
      require(*v >= 0, top, "seed", "must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(*v);
    }
    top.finish();
  }
  {
    auto s = section("domain");
    if (auto v = s.numbers("periods", 3)) {
      cfg.domain.periods = {(*v)[0], (*v)[1], (*v)[2]};
      try {
        cfg.domain.validate();
      } catch (const InputError& e) {
        s.bad_key("periods", e.what());
      }
    }
    s.finish();
  }
  {
    auto s = section("problem");
    if (auto v = s.number("nu")) {
      require(*v > 0.0, s, "nu", "viscosity must be positive");
      cfg.nu = *v;
    }
    if (auto v = s.number("horizon")) {
      require(*v > 0.0, s, "horizon", "must be positive");
      cfg.horizon = *v;
    }
    s.finish();
  }
  {
    auto s = section("solver");
    if (auto v = s.number("cutoff")) {
      require(*v > 0.0, s, "cutoff", "must be positive");
      cfg.solver.cutoff = *v;
    }
    if (auto v = s.number("dt")) {
      require(*v > 0.0 && *v <= cfg.horizon, s, "dt", "must satisfy 0 < dt <= horizon");
      cfg.solver.dt = *v;
    }
    if (auto v = s.text("scheme")) cfg.solver.scheme = parse_scheme(s, *v);
    if (auto v = s.integer("sample_stride")) {
      require(*v >= 1, s, "sample_stride", "must be at least 1");
      cfg.solver.sample_stride = static_cast<std::size_t>(*v);
    }
    s.finish();
  }
  {
    auto s = section("initial");
    FieldRecipe d;
    d.stream = 0;
    cfg.initial = read_recipe(s, d);
    s.finish();
  }
  {
    auto s = section("forcing");
    FieldRecipe d;
    d.stream = 1;
    cfg.forcing.shape = read_recipe(s, d);
    if (auto v = s.text("envelope")) cfg.forcing.envelope.kind = parse_envelope(s, *v);
    if (auto v = s.number("rate")) cfg.forcing.envelope.rate = *v;
    s.finish();
  }
  {
    auto s = section("constants");
    if (auto v = s.number("c_s")) {
      require(*v > 0.0, s, "c_s", "must be positive");
      cfg.constants = lab::ConstantTable::from_sobolev(*v);
    }
    if (auto v = s.number("k")) {
      require(*v > 0.0, s, "k", "must be positive");
      cfg.constants.k_tri = *v;
    }
    if (auto v = s.number("c")) {
      require(*v > 0.0, s, "c", "must be positive");
      cfg.constants.c_b = *v;
    }
    if (auto v = s.number("c_prime")) {
      require(*v > 0.0, s, "c_prime", "must be positive");
      cfg.constants.c_b_prime = *v;
    }
    s.finish();
  }
  {
    auto s = section("verify");
    if (auto v = s.text("quadrature")) {
      try {
        cfg.quadrature = parse_quadrature_mode(*v);
      } catch (const std::exception&) {
        s.bad_key("quadrature", "expected trapezoid or conservative");
      }
    }
    if (auto v = s.text("kind")) {
      if (*v == "minimal") cfg.kind = CertificateKind::minimal_aposteriori;
      else if (*v == "second") cfg.kind = CertificateKind::second_aposteriori;
      else s.bad_key("kind", "expected minimal or second");
    }
    s.finish();
  }
  {
    auto s = section("robustness");
    auto d = FieldRecipe::named("single-mode");
    d.stream = 2;
    cfg.robustness.direction = read_recipe(s, d);
    if (auto v = s.text("target")) {
      require(*v == "initial" || *v == "forcing", s, "target", "expected initial or forcing");
      cfg.robustness.target = *v;
    }
    if (auto v = s.numbers("magnitudes")) {
      for (double m : *v) require(m >= 0.0, s, "magnitudes", "must be nonnegative");
      cfg.robustness.magnitudes = *v;
    }
    if (auto v = s.numbers("bracket", 2)) {
      require((*v)[0] >= 0.0 && (*v)[0] < (*v)[1], s, "bracket", "expected [lo, hi] with 0 <= lo < hi");
      cfg.robustness.bracket = std::make_pair((*v)[0], (*v)[1]);
    }
    if (auto v = s.number("relative_tolerance")) {
      require(*v > 0.0, s, "relative_tolerance", "must be positive");
      cfg.robustness.relative_tolerance = *v;
    }
    if (auto v = s.integer("max_iterations")) {
      require(*v >= 1, s, "max_iterations", "must be at least 1");
      cfg.robustness.max_iterations = static_cast<int>(*v);
    }
    s.finish();
  }
  {
    auto s = section("sweep");
    if (auto v = s.numbers("cutoffs")) cfg.sweep_cutoffs = *v;
    s.finish();
  }
  {
    auto s = section("lab");
    if (auto v = s.integer("samples")) {
      require(*v >= 0, s, "samples", "must be nonnegative");
      cfg.lab.samples = static_cast<std::size_t>(*v);
    }
    if (auto v = s.number("cutoff")) {
      require(*v > 0.0, s, "cutoff", "must be positive");
      cfg.lab.cutoff = *v;
    }
    if (auto v = s.number("decay_exponent")) cfg.lab.decay_exponent = *v;
    s.finish();
  }
  {
    auto s = section("ode");
    if (auto v = s.number("y0")) cfg.ode.y0 = *v;
    if (auto v = s.number("alpha")) cfg.ode.alpha = *v;
    if (auto v = s.number("n")) cfg.ode.n_exp = *v;
    if (auto v = s.number("horizon")) cfg.ode.horizon = *v;
    if (auto v = s.numbers("times")) cfg.ode.times = *v;
    if (auto v = s.numbers("delta")) cfg.ode.delta = *v;
    if (cfg.ode.times.size() != cfg.ode.delta.size())
      s.bad_key("delta", "times and delta must have the same length");
    s.finish();
  }
  {
    auto s = section("channel");
    if (auto v = s.integer("n")) {
      require(*v >= 1 && *v <= 8, s, "n", "must be between 1 and 8");
      cfg.channel.n = static_cast<int>(*v);
    }
    if (auto v = s.number("Lx")) {
      require(*v > 0.0, s, "Lx", "must be positive");
      cfg.channel.domain.Lx = *v;
    }
    if (auto v = s.number("Lz")) {
      require(*v > 0.0, s, "Lz", "must be positive");
      cfg.channel.domain.Lz = *v;
    }
    if (auto v = s.number("nu")) {
      require(*v > 0.0, s, "nu", "must be positive");
      cfg.channel.nu = *v;
    }
    if (auto v = s.number("horizon")) {
      require(*v > 0.0, s, "horizon", "must be positive");
      cfg.channel.horizon = *v;
    }
    if (auto v = s.integer("random_sets")) {
      require(*v >= 0, s, "random_sets", "must be nonnegative");
      cfg.channel.random_sets = static_cast<int>(*v);
    }
    if (auto v = s.integer("oversample")) {
      require(*v >= 1, s, "oversample", "must be at least 1");
      cfg.channel.oversample = static_cast<int>(*v);
    }
    if (auto v = s.number("decay_exponent")) cfg.channel.decay_exponent = *v;
    if (auto v = s.text("coefficients")) cfg.channel.coefficients = *v;
    s.finish();
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_config(buf.str(), path.string());
  if (cfg.channel.coefficients && cfg.channel.coefficients->is_relative())
    cfg.channel.coefficients = path.parent_path() / *cfg.channel.coefficients;
  return cfg;
}

}  // namespace nsverify
