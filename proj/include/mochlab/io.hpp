#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mochlab/grid.hpp"

namespace mochlab {

/// Shortest "%.17g" rendering, which round-trips every finite double.
std::string format_double(double v);

/// Writes `bytes` to `path` through a sibling temp file and a rename, so
/// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

// Field snapshot: little-endian "MOCH" | u32 version=1 | u64 n | f64 period
// | n x f64 samples.
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::string encode_snapshot(const RealField& f);
RealField decode_snapshot(std::string_view bytes);

void write_snapshot(const std::filesystem::path& path, const RealField& f);
RealField read_snapshot(const std::filesystem::path& path);

/// CSV with header "x,value", one row per node.
std::string field_to_csv(const RealField& f);

}  // namespace mochlab
