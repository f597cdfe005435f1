#include "nsverify/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsverify/errors.hpp"

namespace nsverify {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_field(std::ostream& out, const SpectralVelocityField& field) {
  const auto& p = field.domain().periods;
  out << "nsverify-field 1\n";
  out << "periods " << format_real(p[0]) << ' ' << format_real(p[1]) << ' '
      << format_real(p[2]) << '\n';
  out << "cutoff " << format_real(field.cutoff()) << '\n';
  out << "modes " << field.modes().size() << '\n';
  const auto wave = field.modes().modes();
  const auto coeffs = field.coefficients();
  for (std::size_t i = 0; i < wave.size(); ++i) {
    out << wave[i][0] << ' ' << wave[i][1] << ' ' << wave[i][2];
    for (const auto& c : coeffs[i]) out << ' ' << format_real(c.real()) << ' ' << format_real(c.imag());
    out << '\n';
  }
}

namespace {

std::istringstream next_line(std::istream& in, int& line_no, const char* expect) {
  std::string line;
  if (!std::getline(in, line))
    throw InputError(std::string("field file truncated: expected ") + expect);
  ++line_no;
  return std::istringstream(line);
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw InputError("field file line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

SpectralVelocityField read_field(std::istream& in) {
  int line_no = 0;
  std::string word;
  int version = 0;
  auto header = next_line(in, line_no, "header");
  if (!(header >> word >> version) || word != "nsverify-field" || version != 1)
    fail(line_no, "expected 'nsverify-field 1'");

  DomainSpec domain;
  auto periods = next_line(in, line_no, "periods");
  if (!(periods >> word >> domain.periods[0] >> domain.periods[1] >> domain.periods[2]) ||
      word != "periods")
    fail(line_no, "expected 'periods L1 L2 L3'");

  double cutoff = 0.0;
  auto cut = next_line(in, line_no, "cutoff");
  if (!(cut >> word >> cutoff) || word != "cutoff") fail(line_no, "expected 'cutoff <value>'");

  std::size_t count = 0;
  auto modes_line = next_line(in, line_no, "modes");
  if (!(modes_line >> word >> count) || word != "modes") fail(line_no, "expected 'modes <N>'");

  auto modes = ModeSet::make(domain, cutoff);
  std::vector<Vec3c> coeffs(modes->size(), Vec3c{});
  std::vector<bool> seen(modes->size(), false);
  for (std::size_t r = 0; r < count; ++r) {
    auto rec = next_line(in, line_no, "mode record");
    WaveVector k;
    double v[6];
    if (!(rec >> k[0] >> k[1] >> k[2] >> v[0] >> v[1] >> v[2] >> v[3] >> v[4] >> v[5]))
      fail(line_no, "malformed mode record");
    const auto hit = modes->find(k);
    if (!hit) fail(line_no, "mode is zero or above the cutoff");
    if (seen[hit->index]) fail(line_no, "duplicate mode");
    seen[hit->index] = true;
    for (int c = 0; c < 3; ++c) {
      const std::complex<double> z(v[2 * c], v[2 * c + 1]);
      coeffs[hit->index][c] = hit->conjugate ? std::conj(z) : z;
    }
  }
  return {std::move(modes), std::move(coeffs)};
}

void save_field(const std::filesystem::path& path, const SpectralVelocityField& field) {
  std::ostringstream out;
  write_field(out, field);
  write_file_atomic(path, out.str());
}

SpectralVelocityField load_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open field file " + path.string());
  return read_field(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace nsverify
