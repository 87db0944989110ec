#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "franson/coincidence.hpp"

namespace franson {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_io_error = 2,
  exit_numeric_error = 3,
};

struct ScanArgs {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  FringeSign sign = FringeSign::Dip;
  bool counts = false;
  std::optional<std::string> out;
  std::optional<std::string> svg;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct FitArgs {
  std::string in;
  std::string model;
  std::optional<std::string> config;
  std::optional<std::string> out;
};

struct ReportArgs {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::optional<std::string> out_dir;
};

/// Each command writes its human-readable output to `out`, diagnostics to
/// `err`, and returns an ExitCode.
int command_scan(const ScanArgs& args, std::ostream& out, std::ostream& err);
int command_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int command_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

}  // namespace franson
