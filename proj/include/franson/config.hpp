#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "franson/counts.hpp"
#include "franson/scenarios.hpp"

namespace franson {

/// Source block, already converted to SI units. Unset fields fall back to
/// the preset (or to the custom-scan defaults).
struct SourceSettings {
  std::optional<double> pump_wavelength;
  std::optional<double> center_wavelength_u;
  std::optional<double> center_wavelength_l;
  std::optional<SpectralKind> spectral_kind;
  /// c * T_w [m]
  std::optional<double> correlation_length;
  std::optional<double> visibility;
  std::optional<double> delta_x0;
};

/// A stage is either held at one value or scanned over a grid.
using StageSetting = std::variant<double, Grid>;

/// Stage block in SI units (metres, radians).
struct StageSettings {
  std::optional<StageSetting> dx1;
  std::optional<StageSetting> dx2;
  std::optional<StageSetting> dx3;
  std::optional<StageSetting> theta1;
  std::optional<StageSetting> theta2;
  std::optional<double> geometry_factor;
};

struct OutputSettings {
  std::optional<std::string> csv;
  std::optional<std::string> svg;
};

struct RunConfig {
  SourceSettings source;
  StageSettings stages;
  CountingConfig counting;
  bool counting_given = false;
  OutputSettings output;
};

/// Parses and validates a JSON run configuration. Throws SchemaError naming
/// the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Source from the config, with unset fields taken from `defaults`. When
/// both centre wavelengths are given they must satisfy energy conservation
/// with the pump to 1e-6 relative; lambda_l is then recomputed from the pump.
BiphotonSource resolve_source(const SourceSettings& settings, const BiphotonSource& defaults);

/// Scan definition for a preset with config overrides, or for a custom scan
/// (no preset) whose stages block must contain exactly one grid.
ScanSpec resolve_scan(const RunConfig& config, std::optional<Preset> preset, FringeSign sign);

}  // namespace franson
