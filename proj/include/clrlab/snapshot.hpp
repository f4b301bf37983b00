#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "clrlab/nn.hpp"

namespace clrlab {

/// Snapshot layout: one ASCII header line
///   CLRLAB1 <layer sizes, comma-separated> <relu|tanh> <param_count>\n
/// followed by param_count IEEE-754 doubles in little-endian byte order.
void write_snapshot(std::ostream& out, const NetworkWeights& w);
NetworkWeights read_snapshot(std::istream& in, const std::string& source_name);

void save_snapshot(const std::filesystem::path& path, const NetworkWeights& w);
/// Throws IoError when the file cannot be opened, DataError when its
/// contents are malformed or contain non-finite values.
NetworkWeights load_snapshot(const std::filesystem::path& path);

/// "snapshot_<iteration>.clr"
std::string snapshot_filename(std::uint64_t iteration);

}  // namespace clrlab
