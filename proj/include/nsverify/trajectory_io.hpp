#pragma once

// Trajectory norm table as CSV:
//
//   t,u_l2,Du,Au,u_v3,r_v1,r_v2
//
// one row per stored sample, reals in %.17g.  States are not part of the
// table; they travel as spectral field files next to it.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nsverify/galerkin_solver.hpp"

namespace nsverify {

inline constexpr const char* kTrajectoryHeader = "t,u_l2,Du,Au,u_v3,r_v1,r_v2";

std::string trajectory_csv(const Trajectory& traj);

/// Parses the table (cutoff, states and initial_state are left empty).
/// Throws InputError naming the line on a wrong header, a missing column or
/// a malformed value, and when the result fails Trajectory::validate.
Trajectory read_trajectory_csv(std::istream& in);
Trajectory load_trajectory_csv(const std::filesystem::path& path);

}  // namespace nsverify
