#include "franson/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "franson/errors.hpp"

namespace franson {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view context,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) {
      throw SchemaError(std::string(context) + ": unknown key '" + item.key() + "'");
    }
  }
}

const json& object_at(const json& parent, const char* key) {
  const json& value = parent.at(key);
  if (!value.is_object()) throw SchemaError(std::string(key) + " must be an object");
  return value;
}

std::optional<double> number(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const json& value = obj.at(key);
  if (!value.is_number()) throw SchemaError(std::string(key) + " must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw SchemaError(std::string(key) + " must be finite");
  return x;
}

std::optional<double> positive(const json& obj, const char* key) {
  auto x = number(obj, key);
  if (x && !(*x > 0.0)) throw SchemaError(std::string(key) + " must be positive");
  return x;
}

std::optional<double> non_negative(const json& obj, const char* key) {
  auto x = number(obj, key);
  if (x && !(*x >= 0.0)) throw SchemaError(std::string(key) + " must be >= 0");
  return x;
}

std::optional<std::string> text(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const json& value = obj.at(key);
  if (!value.is_string()) throw SchemaError(std::string(key) + " must be a string");
  return value.get<std::string>();
}

std::optional<SpectralKind> parse_kind(const std::string& name) {
  for (auto kind : {SpectralKind::SincSquared, SpectralKind::Gaussian,
                    SpectralKind::RectangularDensity}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<StageSetting> stage(const json& obj, const char* key, double unit) {
  if (!obj.contains(key)) return std::nullopt;
  const json& value = obj.at(key);
  if (value.is_number()) {
    const double x = value.get<double>();
    if (!std::isfinite(x)) throw SchemaError(std::string(key) + " must be finite");
    return x * unit;
  }
  if (!value.is_object()) {
    throw SchemaError(std::string(key) + " must be a number or {start, stop, step}");
  }
  const std::string context = std::string("stages.") + key;
  reject_unknown(value, context, {"start", "stop", "step"});
  for (const char* field : {"start", "stop", "step"}) {
    if (!value.contains(field)) throw SchemaError(context + " is missing '" + field + "'");
  }
  const double start = *number(value, "start");
  const double stop = *number(value, "stop");
  const double step = *number(value, "step");
  if (!(step > 0.0)) throw SchemaError(context + ".step must be positive");
  if (!(stop >= start)) throw SchemaError(context + ".stop must be >= start");
  if ((stop - start) / step > 1e7) throw SchemaError(context + " has more than 1e7 points");
  return Grid{start * unit, stop * unit, step * unit};
}

void check_energy(double pump, double lambda_u, double lambda_l) {
  const double mismatch = std::abs(1.0 / lambda_u + 1.0 / lambda_l - 1.0 / pump) * pump;
  if (mismatch > 1e-6) {
    throw SchemaError("center wavelengths violate energy conservation with the pump (relative "
                      "mismatch " + std::to_string(mismatch) + " > 1e-6)");
  }
}

SourceSettings parse_source(const json& obj) {
  reject_unknown(obj, "source",
                 {"pump_wavelength_nm", "center_wavelength_u_nm", "center_wavelength_l_nm",
                  "spectral_kind", "correlation_width_um", "visibility", "dx0_mm"});
  SourceSettings s;
  if (auto x = positive(obj, "pump_wavelength_nm")) s.pump_wavelength = *x * nanometre;
  if (auto x = positive(obj, "center_wavelength_u_nm")) s.center_wavelength_u = *x * nanometre;
  if (auto x = positive(obj, "center_wavelength_l_nm")) s.center_wavelength_l = *x * nanometre;
  if (auto name = text(obj, "spectral_kind")) {
    s.spectral_kind = parse_kind(*name);
    if (!s.spectral_kind) {
      throw SchemaError("spectral_kind must be one of sinc_squared, gaussian, rectangular_density");
    }
  }
  if (auto x = positive(obj, "correlation_width_um")) s.correlation_length = *x * micrometre;
  if (auto x = number(obj, "visibility")) {
    if (!(*x >= 0.0 && *x <= 1.0)) throw SchemaError("visibility must be in [0,1]");
    s.visibility = *x;
  }
  if (auto x = number(obj, "dx0_mm")) s.delta_x0 = *x * millimetre;

  const double pump = s.pump_wavelength.value_or(preset_pump_wavelength);
  for (const auto& lambda : {s.center_wavelength_u, s.center_wavelength_l}) {
    if (lambda && !(*lambda > pump)) {
      throw SchemaError("center wavelengths must be longer than the pump wavelength");
    }
  }
  if (s.center_wavelength_u && s.center_wavelength_l) {
    check_energy(pump, *s.center_wavelength_u, *s.center_wavelength_l);
  }
  return s;
}

StageSettings parse_stages(const json& obj) {
  reject_unknown(obj, "stages", {"dx1_um", "dx2_um", "dx3_um", "theta1_deg", "theta2_deg",
                                 "geometry_factor"});
  StageSettings s;
  s.dx1 = stage(obj, "dx1_um", micrometre);
  s.dx2 = stage(obj, "dx2_um", micrometre);
  s.dx3 = stage(obj, "dx3_um", micrometre);
  s.theta1 = stage(obj, "theta1_deg", degree);
  s.theta2 = stage(obj, "theta2_deg", degree);
  s.geometry_factor = positive(obj, "geometry_factor");
  return s;
}

CountingConfig parse_counting(const json& obj) {
  reject_unknown(obj, "counting", {"plateau_rate_hz", "bin_duration_s", "accidental_rate_hz", "seed"});
  CountingConfig c;
  if (auto x = positive(obj, "plateau_rate_hz")) c.plateau_rate = *x;
  if (auto x = positive(obj, "bin_duration_s")) c.bin_duration = *x;
  if (auto x = non_negative(obj, "accidental_rate_hz")) c.accidental_rate = *x;
  if (obj.contains("seed")) {
    const json& seed = obj.at("seed");
    if (!seed.is_number_unsigned()) throw SchemaError("seed must be a non-negative integer");
    c.rng_seed = seed.get<std::uint64_t>();
  }
  return c;
}

OutputSettings parse_output(const json& obj) {
  reject_unknown(obj, "output", {"csv", "svg"});
  return {text(obj, "csv"), text(obj, "svg")};
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("config must be a JSON object");
  reject_unknown(root, "config", {"source", "stages", "counting", "output"});

  RunConfig cfg;
  if (root.contains("source")) cfg.source = parse_source(object_at(root, "source"));
  if (root.contains("stages")) cfg.stages = parse_stages(object_at(root, "stages"));
  if (root.contains("counting")) {
    cfg.counting = parse_counting(object_at(root, "counting"));
    cfg.counting_given = true;
  }
  if (root.contains("output")) cfg.output = parse_output(object_at(root, "output"));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

BiphotonSource resolve_source(const SourceSettings& s, const BiphotonSource& defaults) {
  const double pump = s.pump_wavelength.value_or(defaults.pump_wavelength());
  auto partner = [pump](double lambda) { return 1.0 / (1.0 / pump - 1.0 / lambda); };

  double lambda_u = defaults.center_wavelength_u();
  double lambda_l = defaults.center_wavelength_l();
  if (s.center_wavelength_u && s.center_wavelength_l) {
    check_energy(pump, *s.center_wavelength_u, *s.center_wavelength_l);
    lambda_u = *s.center_wavelength_u;
    lambda_l = partner(lambda_u);
  } else if (s.center_wavelength_u) {
    lambda_u = *s.center_wavelength_u;
    lambda_l = partner(lambda_u);
  } else if (s.center_wavelength_l) {
    lambda_l = *s.center_wavelength_l;
    lambda_u = partner(lambda_l);
  } else if (s.pump_wavelength) {
    const double split = defaults.center_wavelength_u() - defaults.center_wavelength_l();
    const auto shifted = BiphotonSource::with_split(pump, split, defaults.spectral(), 1.0);
    lambda_u = shifted.center_wavelength_u();
    lambda_l = shifted.center_wavelength_l();
  }
  if (!(lambda_u > pump && lambda_l > pump)) {
    throw SchemaError("center wavelengths must be longer than the pump wavelength");
  }

  const SpectralKind kind = s.spectral_kind.value_or(defaults.spectral().kind());
  const double width = s.correlation_length ? *s.correlation_length / speed_of_light
                                            : defaults.spectral().correlation_width();
  try {
    return BiphotonSource(pump, lambda_u, lambda_l, SpectralModel<double>(kind, width),
                          s.delta_x0.value_or(defaults.delta_x0()),
                          s.visibility.value_or(defaults.visibility()));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("source: ") + e.what());
  }
}

ScanSpec resolve_scan(const RunConfig& config, std::optional<Preset> preset, FringeSign sign) {
  const StageSettings& st = config.stages;
  const double g = st.geometry_factor.value_or(1.0);

  ScanSpec spec = [&] {
    if (preset && *preset != Preset::Custom) {
      const auto source = resolve_source(config.source, preset_source(*preset, sign));
      return preset_spec(*preset, sign, source, g);
    }
    const SpectralModel<double> model(SpectralKind::SincSquared,
                                      preset_coherence_length / speed_of_light);
    const auto fallback = BiphotonSource::degenerate(preset_pump_wavelength, model, 1.0);
    ScanSpec custom{Preset::Custom, ScanAxis::Dx1, {}, {}, resolve_source(config.source, fallback),
                    sign};
    custom.fixed.geometry_factor = g;
    custom.fixed.theta1 = pi / 4;
    custom.fixed.theta2 = sign == FringeSign::Peak ? pi / 4 : -pi / 4;
    custom.fixed.dx0 = custom.source.delta_x0();
    return custom;
  }();

  const std::array<std::pair<const std::optional<StageSetting>*, ScanAxis>, 5> entries{{
      {&st.dx1, ScanAxis::Dx1},
      {&st.dx2, ScanAxis::Dx2},
      {&st.dx3, ScanAxis::Dx3},
      {&st.theta1, ScanAxis::Theta1},
      {&st.theta2, ScanAxis::Theta2},
  }};

  int grids = 0;
  for (const auto& [setting, axis] : entries) {
    if (*setting && std::holds_alternative<Grid>(**setting)) ++grids;
  }
  if (grids > 1) throw SchemaError("stages: at most one stage may be given as a grid");
  const bool is_custom = spec.preset == Preset::Custom;
  if (is_custom && grids == 0) throw SchemaError("stages: a custom scan needs one stage grid");

  for (const auto& [setting, axis] : entries) {
    if (!*setting) continue;
    if (const auto* grid = std::get_if<Grid>(&**setting)) {
      spec.axis = axis;
      spec.grid = *grid;
      continue;
    }
    if (grids == 0 && axis == spec.axis) {
      throw SchemaError("stages: " + std::string(to_string(axis)) + " is the scan axis of " +
                        std::string(to_string(spec.preset)) + " and must be a grid");
    }
    StageConfig& f = spec.fixed;
    const double value = std::get<double>(**setting);
    switch (axis) {
      case ScanAxis::Dx1: f.dx1 = value; break;
      case ScanAxis::Dx2: f.dx2 = value; break;
      case ScanAxis::Dx3: f.dx3 = value; break;
      case ScanAxis::Theta1: f.theta1 = value; break;
      case ScanAxis::Theta2: f.theta2 = value; break;
    }
  }
  return spec;
}

}  // namespace franson
