#include "franson/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "franson/errors.hpp"

namespace franson {

void write_csv(std::ostream& out, std::span<const CountRecord> records) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", csv_header);
  for (const auto& r : records) {
    fmt::format_to(std::back_inserter(buf), "{},{},", r.position, r.probability);
    if (r.counts) fmt::format_to(std::back_inserter(buf), "{},{}", *r.counts, r.uncertainty);
    else fmt::format_to(std::back_inserter(buf), ",");
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_csv(const std::filesystem::path& path, std::span<const CountRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(out, records);
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <class T>
T parse_cell(std::string_view cell, std::size_t line, const char* column) {
  T value{};
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw SchemaError("csv line " + std::to_string(line) + ": bad " + column + " '" +
                      std::string(cell) + "'");
  }
  return value;
}

}  // namespace

std::vector<CountRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header) {
    throw SchemaError("csv header must be '" + std::string(csv_header) + "', got '" + line + "'");
  }

  std::vector<CountRecord> records;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) {
      throw SchemaError("csv line " + std::to_string(number) + ": expected 4 cells");
    }
    CountRecord r;
    r.position = parse_cell<double>(cells[0], number, "position");
    r.probability = cells[1].empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : parse_cell<double>(cells[1], number, "probability");
    if (!cells[2].empty()) {
      r.counts = parse_cell<std::uint64_t>(cells[2], number, "counts");
      r.uncertainty = cells[3].empty() ? std::sqrt(static_cast<double>(*r.counts))
                                       : parse_cell<double>(cells[3], number, "uncertainty");
    } else if (!cells[3].empty()) {
      throw SchemaError("csv line " + std::to_string(number) + ": uncertainty without counts");
    }
    if (!std::isfinite(r.position)) {
      throw SchemaError("csv line " + std::to_string(number) + ": position must be finite");
    }
    records.push_back(r);
  }
  if (in.bad()) throw IoError("csv read failed");
  return records;
}

std::vector<CountRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_csv(in);
}

}  // namespace franson
