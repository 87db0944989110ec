#include "franson/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace franson {

DelaySet stage_to_delays(const StageConfig& cfg) {
  const double g = cfg.geometry_factor;
  const double m1 = g * cfg.dx1;
  DelaySet d;
  d.long_path_u = -m1 + g * cfg.dx2;
  d.long_path_l = m1 - g * cfg.dx3;
  d.source_path_offset = cfg.dx0;
  return d;
}

std::vector<PathAmplitude<double>> stage_paths(const StageConfig& cfg) {
  if (!(cfg.geometry_factor > 0.0)) throw std::invalid_argument("geometry_factor must be positive");
  const DelaySet d = stage_to_delays(cfg);
  return enumerate_paths(entangled_input(d.source_path_offset), LongArm<double>{d.long_path_u},
                         LongArm<double>{d.long_path_l});
}

double engine_probability(const StageConfig& cfg, const BiphotonSource& source,
                          const EngineOptions& options) {
  const auto paths = stage_paths(cfg);
  return coincidence_probability(paths, source.with_delta_x0(cfg.dx0),
                                 {cfg.theta1, cfg.theta2}, options);
}

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::Fig2a: return "fig2a";
    case Preset::Fig2b: return "fig2b";
    case Preset::Fig2c: return "fig2c";
    case Preset::Fig2d: return "fig2d";
    case Preset::Fig3: return "fig3";
    case Preset::Fig4: return "fig4";
    case Preset::Custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::Dx1: return "dx1";
    case ScanAxis::Dx2: return "dx2";
    case ScanAxis::Dx3: return "dx3";
    case ScanAxis::Theta1: return "theta1";
    case ScanAxis::Theta2: return "theta2";
  }
  return "unknown";
}

std::optional<Preset> parse_preset(std::string_view name) {
  for (Preset p : {Preset::Fig2a, Preset::Fig2b, Preset::Fig2c, Preset::Fig2d, Preset::Fig3,
                   Preset::Fig4, Preset::Custom}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::size_t Grid::size() const {
  if (!(step > 0.0) || !(stop >= start)) return 0;
  const double n = (stop - start) / step;
  return static_cast<std::size_t>(std::floor(n + 1e-9)) + 1;
}

Grid Grid::spanning(double start, double stop, std::size_t intervals) {
  return {start, stop, (stop - start) / static_cast<double>(intervals)};
}

StageConfig stage_at(const ScanSpec& spec, double position) {
  StageConfig cfg = spec.fixed;
  switch (spec.axis) {
    case ScanAxis::Dx1: cfg.dx1 = position; break;
    case ScanAxis::Dx2: cfg.dx2 = position; break;
    case ScanAxis::Dx3: cfg.dx3 = position; break;
    case ScanAxis::Theta1: cfg.theta1 = position; break;
    case ScanAxis::Theta2: cfg.theta2 = position; break;
  }
  return cfg;
}

std::optional<double> shortest_period(const ScanSpec& spec) {
  const double g = spec.fixed.geometry_factor;
  switch (spec.axis) {
    case ScanAxis::Dx1: {
      const double dw = std::abs(spec.source.beat_angular_frequency());
      if (dw == 0.0) return std::nullopt;
      return two_pi * speed_of_light / (dw * g);
    }
    case ScanAxis::Dx2: return spec.source.center_wavelength_u() / g;
    case ScanAxis::Dx3: return spec.source.center_wavelength_l() / g;
    case ScanAxis::Theta1:
    case ScanAxis::Theta2: return pi;
  }
  return std::nullopt;
}

ScanResult run_scan(const ScanSpec& spec, const ScanOptions& options) {
  const std::size_t n = spec.grid.size();
  if (n == 0) throw std::invalid_argument("scan grid is empty");

  ScanResult result{spec, {}, {}, {}, {}};
  result.positions.resize(n);
  result.probabilities.resize(n);
  result.conditions.resize(n);

  if (const auto period = shortest_period(spec); period && spec.grid.step > *period / 8.0) {
    result.warnings.push_back("GridTooCoarse: step " + std::to_string(spec.grid.step) +
                              " leaves fewer than 8 points per period " + std::to_string(*period));
  }

  const BiphotonSource source = spec.source.with_delta_x0(spec.fixed.dx0);
  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double x = spec.grid.at(i);
      const StageConfig cfg = stage_at(spec, x);
      result.positions[i] = x;
      result.probabilities[i] = engine_probability(cfg, source, options.engine);
      result.conditions[i] = check_interference_conditions(stage_to_delays(cfg), source);
    }
  };

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::min<std::size_t>(n, 64)));
  if (threads == 1) {
    evaluate(0, n);
    return result;
  }

  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, t, begin, end] {
        try {
          evaluate(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return result;
}

double oracle_probability(const ScanSpec& spec, double position) {
  const StageConfig cfg = stage_at(spec, position);
  const BiphotonSource source = spec.source.with_delta_x0(cfg.dx0);
  if (spec.axis == ScanAxis::Theta1 || spec.axis == ScanAxis::Theta2) {
    if (cfg.dx0 != 0.0 || cfg.dx1 != 0.0 || cfg.dx2 != 0.0 || cfg.dx3 != 0.0) {
      throw ProtocolViolation("analyzer law needs all stages at their reference positions");
    }
    const double v = source.visibility();
    return 0.5 * (1.0 + v) * polarization_correlation({cfg.theta1, cfg.theta2}, v);
  }
  const auto sign = fringe_sign({cfg.theta1, cfg.theta2});
  if (!sign) throw ProtocolViolation("closed form needs +-45 degree analyzers");
  return analytic_probability(cfg.dx1, cfg.dx2, cfg.dx3, source, *sign, cfg.geometry_factor);
}

double preset_visibility(Preset preset, FringeSign sign) {
  const bool peak = sign == FringeSign::Peak;
  switch (preset) {
    case Preset::Fig2a: return peak ? 0.92 : 0.93;
    case Preset::Fig2b: return 0.91;
    case Preset::Fig2c: return 0.91;
    case Preset::Fig2d: return 0.94;
    case Preset::Fig3: return peak ? 0.92 : 0.91;
    case Preset::Fig4: return peak ? 0.92 : 0.93;
    case Preset::Custom: return 1.0;
  }
  return 1.0;
}

BiphotonSource preset_source(Preset preset, FringeSign sign) {
  const double v = preset_visibility(preset, sign);
  if (preset == Preset::Fig3) {
    const SpectralModel<double> wide(SpectralKind::SincSquared,
                                     preset_beat_coherence_length / speed_of_light);
    return BiphotonSource::with_split(preset_pump_wavelength, preset_wavelength_split, wide, v);
  }
  const SpectralModel<double> model(SpectralKind::SincSquared,
                                    preset_coherence_length / speed_of_light);
  const double dx0 = preset == Preset::Fig4 ? preset_source_offset : 0.0;
  return BiphotonSource::degenerate(preset_pump_wavelength, model, v, dx0);
}

ScanSpec preset_spec(Preset preset, FringeSign sign) {
  return preset_spec(preset, sign, preset_source(preset, sign));
}

ScanSpec preset_spec(Preset preset, FringeSign sign, const BiphotonSource& source,
                     double geometry_factor) {
  if (preset == Preset::Custom) throw std::invalid_argument("custom scans have no preset grid");

  ScanSpec spec{preset, ScanAxis::Dx1, {}, {}, source, sign};
  spec.fixed.geometry_factor = geometry_factor;
  spec.fixed.theta1 = pi / 4;
  spec.fixed.theta2 = sign == FringeSign::Peak ? pi / 4 : -pi / 4;
  spec.fixed.dx0 = source.delta_x0();

  const double coherence = speed_of_light * source.spectral().correlation_width();
  const double m1_support = coherence / (2.0 * geometry_factor);
  const double arm_support = coherence / geometry_factor;

  switch (preset) {
    case Preset::Fig2a:
    case Preset::Fig3:
      spec.grid = Grid::spanning(-1.5 * m1_support, 1.5 * m1_support, 200);
      break;
    case Preset::Fig4:
      spec.grid = Grid::spanning(std::min(0.0, spec.fixed.dx0) - 1.5 * m1_support,
                                 std::max(0.0, spec.fixed.dx0) + 1.5 * m1_support, 200);
      break;
    case Preset::Fig2b: {
      spec.axis = ScanAxis::Dx2;
      const double span = 3.0 * arm_support;
      const double period = source.center_wavelength_u() / geometry_factor;
      const auto intervals = static_cast<std::size_t>(std::ceil(span / (period / 10.0)));
      spec.grid = Grid::spanning(-1.5 * arm_support, 1.5 * arm_support, intervals);
      break;
    }
    case Preset::Fig2c: {
      spec.axis = ScanAxis::Dx3;
      const double period = source.center_wavelength_l() / geometry_factor;
      spec.grid = Grid::spanning(-period, period, 100);
      break;
    }
    case Preset::Fig2d:
      spec.axis = ScanAxis::Theta2;
      spec.fixed.theta2 = spec.fixed.theta1;
      spec.grid = Grid::spanning(spec.fixed.theta1 - pi, spec.fixed.theta1 + pi, 100);
      break;
    case Preset::Custom: break;
  }
  return spec;
}

}  // namespace franson
