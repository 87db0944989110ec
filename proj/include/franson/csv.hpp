#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "franson/counts.hpp"

namespace franson {

inline constexpr const char* csv_header = "position,probability,counts,uncertainty";

/// One row per record with shortest round-trip decimals. The counts and
/// uncertainty cells stay empty for noiseless records.
void write_csv(std::ostream& out, std::span<const CountRecord> records);
void write_csv(const std::filesystem::path& path, std::span<const CountRecord> records);

/// Inverse of write_csv. Throws SchemaError on a wrong header or a
/// malformed row, IoError when the file cannot be opened.
std::vector<CountRecord> read_csv(std::istream& in);
std::vector<CountRecord> read_csv(const std::filesystem::path& path);

}  // namespace franson
