#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "choquard/grid.hpp"

namespace choquard {

/// CHQF field dump: magic "CHQF", version u32, dim u32, n u32, L float64,
/// then n^dim little-endian float64 values in lexicographic order.
/// Round-trips are bit-exact.
void dump_field(const Field& f, const std::filesystem::path& file);
Field load_field(const std::filesystem::path& file);

/// FNV-1a 64-bit checksum of a file's bytes (manifest integrity checks).
std::uint64_t file_checksum(const std::filesystem::path& file);

}  // namespace choquard
