#pragma once

// Spectral field text format, version 1:
//
//   nsverify-field 1
//   periods <L1> <L2> <L3>
//   cutoff <Lambda>
//   modes <N>
//   <k1> <k2> <k3> <Re u1> <Im u1> <Re u2> <Im u2> <Re u3> <Im u3>   (N lines)
//
// One record per stored representative, in mode-set order (ascending
// eigenvalue, ties lexicographic).  Reals are printed with %.17g so a
// write/read cycle is bit-exact.  Readers also accept records for the
// negative member of a pair (the coefficient is conjugated) and omitted
// modes (zero).

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nsverify/spectral_field.hpp"

namespace nsverify {

/// %.17g rendering used by every text artifact.
std::string format_real(double value);

void write_field(std::ostream& out, const SpectralVelocityField& field);
SpectralVelocityField read_field(std::istream& in);

void save_field(const std::filesystem::path& path, const SpectralVelocityField& field);
SpectralVelocityField load_field(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace nsverify
