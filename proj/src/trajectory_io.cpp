#include "nsverify/trajectory_io.hpp"

#include <cerrno>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "nsverify/errors.hpp"
#include "nsverify/field_io.hpp"

namespace nsverify {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& n = traj.norms[i];
    for (double v : {traj.times[i], n.u_l2, n.du, n.au, n.u_v3, n.r_v1}) {
      out += format_real(v);
      out += ',';
    }
    out += format_real(n.r_v2);
    out += '\n';
  }
  return out;
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("trajectory csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  static const std::vector<std::string> expected = split(kTrajectoryHeader);
  const auto header = split(line);
  for (const auto& name : expected)
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw InputError("trajectory csv line 1: missing column '" + name + "'");
  if (header != expected)
    throw InputError("trajectory csv line 1: expected header '" +
                     std::string(kTrajectoryHeader) + "'");

  Trajectory traj;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected.size())
      throw InputError("trajectory csv line " + std::to_string(lineno) + ": expected " +
                       std::to_string(expected.size()) + " values");
    double v[7];
    for (std::size_t j = 0; j < 7; ++j) {
      errno = 0;
      char* end = nullptr;
      v[j] = std::strtod(cells[j].c_str(), &end);
      if (cells[j].empty() || end != cells[j].c_str() + cells[j].size() || errno == ERANGE)
        throw InputError("trajectory csv line " + std::to_string(lineno) + ": bad value '" +
                         cells[j] + "' in column " + expected[j]);
    }
    traj.times.push_back(v[0]);
    traj.norms.push_back({v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  if (traj.times.empty()) throw InputError("trajectory csv: no samples");
  traj.validate();
  return traj;
}

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trajectory " + path.string());
  try {
    return read_trajectory_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace nsverify
