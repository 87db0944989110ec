#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "franson/coincidence.hpp"

namespace franson {

/// Stage positions [m] and analyzer angles [rad].
struct StageConfig {
  double dx0 = 0.0;
  double dx1 = 0.0;
  double dx2 = 0.0;
  double dx3 = 0.0;
  double theta1 = pi / 4;
  double theta2 = pi / 4;
  /// Optical path change per unit stage travel in each arm.
  double geometry_factor = 1.0;
};

/// Long-arm paths: L_u = g(-dx1 + dx2), L_l = g(dx1 - dx3). Positive dx1
/// moves the double-sided mirror toward the lower arm, so L_u + L_l is
/// independent of dx1.
DelaySet stage_to_delays(const StageConfig& cfg);

std::vector<PathAmplitude<double>> stage_paths(const StageConfig& cfg);

/// Engine probability at one stage configuration. The source's dx0 is
/// replaced by cfg.dx0.
double engine_probability(const StageConfig& cfg, const BiphotonSource& source,
                          const EngineOptions& options = {});

enum class Preset { Fig2a, Fig2b, Fig2c, Fig2d, Fig3, Fig4, Custom };
enum class ScanAxis { Dx1, Dx2, Dx3, Theta1, Theta2 };

std::string_view to_string(Preset preset);
std::string_view to_string(ScanAxis axis);
std::optional<Preset> parse_preset(std::string_view name);

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// Number of points start + i*step that do not pass stop.
  std::size_t size() const;
  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }

  /// `intervals` equal steps from start to stop.
  static Grid spanning(double start, double stop, std::size_t intervals);
};

struct ScanSpec {
  Preset preset = Preset::Custom;
  ScanAxis axis = ScanAxis::Dx1;
  Grid grid;
  StageConfig fixed;
  BiphotonSource source;
  FringeSign sign = FringeSign::Dip;
};

struct ScanResult {
  ScanSpec spec;
  std::vector<double> positions;
  std::vector<double> probabilities;
  std::vector<InterferenceConditions> conditions;
  std::vector<std::string> warnings;
};

struct ScanOptions {
  EngineOptions engine{};
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Stage configuration at one grid position.
StageConfig stage_at(const ScanSpec& spec, double position);

/// Evaluates every grid point (in parallel, assembled in grid order). A
/// GridTooCoarse warning is attached when the step leaves fewer than 8
/// points per period of the fastest oscillation along the scanned axis.
ScanResult run_scan(const ScanSpec& spec, const ScanOptions& options = {});

/// Closed-form reference for one grid point: the +-45 degree law for stage
/// scans, 1/2 (1 + V cos 2(theta2 - theta1)) for analyzer scans at zero delay.
double oracle_probability(const ScanSpec& spec, double position);

/// Period of the fastest oscillation along the scan axis, in axis units.
std::optional<double> shortest_period(const ScanSpec& spec);

/// Configured visibility for each preset and fringe sign.
double preset_visibility(Preset preset, FringeSign sign);

/// Default source for a preset: 406.2 nm pump, triangle envelope with
/// c*T_w = 200 um (2 mm for Fig3), and a 1.52 nm split for Fig3.
BiphotonSource preset_source(Preset preset, FringeSign sign);

/// Scan definition for a preset. Envelope scans span 1.5x the envelope
/// support on each side with 200 intervals (Fig4 widens the window to
/// include both 0 and dx0 = 1 mm); Fig2b uses 10 points per optical
/// period; phase and analyzer scans cover two periods with 100 intervals.
ScanSpec preset_spec(Preset preset, FringeSign sign = FringeSign::Dip);
ScanSpec preset_spec(Preset preset, FringeSign sign, const BiphotonSource& source,
                     double geometry_factor = 1.0);

inline constexpr double preset_pump_wavelength = 406.2e-9;
inline constexpr double preset_wavelength_split = 1.52e-9;
inline constexpr double preset_coherence_length = 200e-6;
inline constexpr double preset_beat_coherence_length = 2000e-6;
inline constexpr double preset_source_offset = 1e-3;

}  // namespace franson
