#include "franson/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <typeinfo>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

#include "franson/config.hpp"
#include "franson/csv.hpp"
#include "franson/errors.hpp"
#include "franson/svg.hpp"

namespace franson {

namespace {

using nlohmann::json;

const char* error_name(const Error& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const FitDiverged*>(&e)) return "FitDiverged";
  if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
  if (dynamic_cast<const NoBeatDetected*>(&e)) return "NoBeatDetected";
  if (dynamic_cast<const FeatureOutOfWindow*>(&e)) return "FeatureOutOfWindow";
  if (dynamic_cast<const ProtocolViolation*>(&e)) return "ProtocolViolation";
  if (dynamic_cast<const NormalizationFailure*>(&e)) return "NormalizationFailure";
  if (dynamic_cast<const QuadratureNotConverged*>(&e)) return "QuadratureNotConverged";
  if (dynamic_cast<const InvalidState*>(&e)) return "InvalidState";
  return "Error";
}

// Runs a command body and maps exceptions onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const SchemaError& e) {
    fmt::print(err, "SchemaError: {}\n", e.what());
    return exit_config_error;
  } catch (const IoError& e) {
    fmt::print(err, "IoError: {}\n", e.what());
    return exit_io_error;
  } catch (const Error& e) {
    fmt::print(err, "{}: {}\n", error_name(e), e.what());
    return exit_numeric_error;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "SchemaError: {}\n", e.what());
    return exit_config_error;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_numeric_error;
  }
}

bool is_angle(ScanAxis axis) { return axis == ScanAxis::Theta1 || axis == ScanAxis::Theta2; }

PlotLabels labels_for(const ScanSpec& spec) {
  PlotLabels labels;
  labels.title = fmt::format("{} scan of {}", to_string(spec.preset), to_string(spec.axis));
  if (is_angle(spec.axis)) {
    labels.x_axis = fmt::format("{} [deg]", to_string(spec.axis));
    labels.x_scale = 1.0 / degree;
  } else {
    labels.x_axis = fmt::format("{} [um]", to_string(spec.axis));
    labels.x_scale = 1.0 / micrometre;
  }
  return labels;
}

std::optional<Preset> preset_from(const std::optional<std::string>& name) {
  if (!name) return std::nullopt;
  const auto preset = parse_preset(*name);
  if (!preset) {
    throw SchemaError("unknown preset '" + *name + "' (fig2a, fig2b, fig2c, fig2d, fig3, fig4, custom)");
  }
  return preset;
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

int command_scan(const ScanArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = args.config ? load_config(*args.config) : RunConfig{};
    const auto preset = preset_from(args.preset);
    if (!preset && !args.config) throw SchemaError("scan needs --preset or --config");

    const ScanSpec spec = resolve_scan(cfg, preset, args.sign);
    ScanOptions options;
    options.threads = args.threads;
    const ScanResult result = run_scan(spec, options);
    for (const auto& w : result.warnings) fmt::print(err, "warning: {}\n", w);

    CountingConfig counting = cfg.counting;
    if (args.seed) counting.rng_seed = *args.seed;
    counting.validate();
    const auto records = args.counts ? sample_counts(result, counting) : exact_records(result, counting);

    const auto csv_path = args.out ? args.out : cfg.output.csv;
    const auto svg_path = args.svg ? args.svg : cfg.output.svg;
    if (csv_path) {
      write_csv(std::filesystem::path(*csv_path), records);
    } else {
      write_csv(out, records);
    }
    if (svg_path) {
      const double scale = args.counts ? 2.0 * counting.plateau_rate * counting.bin_duration : 0.0;
      write_svg(*svg_path, records, labels_for(spec), scale);
    }
    if (csv_path) {
      double lo = result.probabilities.front(), hi = lo;
      for (double p : result.probabilities) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
      fmt::print(out, "{} {}: {} points, P in [{:.6f}, {:.6f}], wrote {}\n", to_string(spec.preset),
                 to_string(spec.axis), records.size(), lo, hi, *csv_path);
    }
    return int{exit_ok};
  });
}

int command_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = args.config ? load_config(*args.config) : RunConfig{};
    const auto records = read_csv(std::filesystem::path(args.in));
    const bool sampled = !records.empty() && records.front().counts.has_value();

    EstimatorOptions raw;
    EstimatorOptions subtracted;
    subtracted.accidental_counts = cfg.counting.accidental_rate * cfg.counting.bin_duration;
    const bool subtract = sampled && subtracted.accidental_counts > 0.0;

    json report;
    report["model"] = args.model;
    report["records"] = records.size();

    auto visibility_entry = [](double v, double sigma) { return json{{"value", v}, {"sigma", sigma}}; };

    if (args.model == "hom") {
      const auto fit = fit_triangle(records, raw);
      if (!(std::abs(fit.amplitude) > min_feature_significance * fit.sigma_amplitude)) {
        throw FitDiverged(fmt::format("no significant peak or dip: amplitude {:.3g} +- {:.3g}",
                                      fit.amplitude, fit.sigma_amplitude));
      }
      report["visibility"] = visibility_entry(fit.visibility, fit.sigma_visibility);
      report["center_m"] = visibility_entry(fit.center, fit.sigma_center);
      report["half_width_m"] = visibility_entry(fit.half_width, fit.sigma_half_width);
      fmt::print(out, "V = {:.4f} +- {:.4f}\n", fit.visibility, fit.sigma_visibility);
      fmt::print(out, "center = {:.3f} +- {:.3f} um, FWHM = {:.3f} um\n", fit.center / micrometre,
                 fit.sigma_center / micrometre, fit.half_width / micrometre);
      if (subtract) {
        const auto corr = fit_triangle(records, subtracted);
        report["visibility_accidentals_subtracted"] =
            visibility_entry(corr.visibility, corr.sigma_visibility);
        fmt::print(out, "V (accidentals subtracted) = {:.4f} +- {:.4f}\n", corr.visibility,
                   corr.sigma_visibility);
      }
    } else if (args.model == "fringe") {
      const auto fit = fit_fringe(records, raw);
      report["visibility"] = visibility_entry(fit.visibility, fit.sigma_visibility);
      report["period"] = visibility_entry(fit.period, fit.sigma_period);
      fmt::print(out, "V = {:.4f} +- {:.4f}\n", fit.visibility, fit.sigma_visibility);
      fmt::print(out, "period = {:.4g} +- {:.2g} (position units)\n", fit.period, fit.sigma_period);
      if (subtract) {
        const auto corr = fit_fringe(records, subtracted);
        report["visibility_accidentals_subtracted"] =
            visibility_entry(corr.visibility, corr.sigma_visibility);
        fmt::print(out, "V (accidentals subtracted) = {:.4f} +- {:.4f}\n", corr.visibility,
                   corr.sigma_visibility);
      }
    } else if (args.model == "polarization") {
      const auto fit = fit_polarization_curve(records, raw);
      report["visibility"] = visibility_entry(fit.visibility, fit.sigma_visibility);
      report["theta0_rad"] = fit.theta0;
      fmt::print(out, "V = {:.4f} +- {:.4f}, maximum at theta2 = {:.2f} deg\n", fit.visibility,
                 fit.sigma_visibility, fit.theta0 / degree);
      if (subtract) {
        const auto corr = fit_polarization_curve(records, subtracted);
        report["visibility_accidentals_subtracted"] =
            visibility_entry(corr.visibility, corr.sigma_visibility);
        fmt::print(out, "V (accidentals subtracted) = {:.4f} +- {:.4f}\n", corr.visibility,
                   corr.sigma_visibility);
      }
    } else if (args.model == "beat") {
      const double pump = cfg.source.pump_wavelength.value_or(preset_pump_wavelength);
      const double center = 2.0 * pump;
      const auto beat = estimate_beat_frequency(records, center, subtract ? subtracted : raw);
      report["delta_f_hz"] = visibility_entry(beat.delta_f, beat.sigma_delta_f);
      report["delta_lambda_m"] = visibility_entry(beat.delta_lambda, beat.sigma_delta_lambda);
      fmt::print(out, "delta f = {:.4f} +- {:.4f} THz\n", beat.delta_f * 1e-12,
                 beat.sigma_delta_f * 1e-12);
      fmt::print(out, "delta lambda = {:.4f} +- {:.4f} nm at {:.1f} nm\n",
                 beat.delta_lambda / nanometre, beat.sigma_delta_lambda / nanometre,
                 center / nanometre);
    } else if (args.model == "envelope") {
      const auto c = fit_envelope_center(records, subtract ? subtracted : raw);
      report["center_m"] = visibility_entry(c.center, c.sigma);
      report["fwhm_m"] = c.width;
      // Long-arm path difference L_l - L_u at the apex of an M1 scan.
      report["path_difference_m"] = 2.0 * c.center;
      fmt::print(out, "center = {:.4f} +- {:.4f} mm, FWHM = {:.1f} um\n", c.center / millimetre,
                 c.sigma / millimetre, c.width / micrometre);
      fmt::print(out, "long-arm path difference at the apex = {:.4f} mm\n", 2.0 * c.center / millimetre);
    } else {
      throw SchemaError("unknown model '" + args.model + "' (hom, beat, polarization, envelope, fringe)");
    }

    if (args.out) {
      write_json(report, *args.out);
    } else {
      out << report.dump() << '\n';
    }
    return int{exit_ok};
  });
}

int command_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CountingConfig counting;
    counting.rng_seed = args.seed;
    ScanOptions options;
    options.threads = args.threads;

    auto sampled = [&](Preset preset, FringeSign sign) {
      const auto spec = preset_spec(preset, sign);
      const auto result = run_scan(spec, options);
      auto records = sample_counts(result, counting);
      if (args.out_dir) {
        const std::filesystem::path dir(*args.out_dir);
        std::filesystem::create_directories(dir);
        const std::string stem =
            fmt::format("{}_{}", to_string(preset), sign == FringeSign::Peak ? "peak" : "dip");
        write_csv(dir / (stem + ".csv"), records);
        write_svg(dir / (stem + ".svg"), records, labels_for(spec),
                  2.0 * counting.plateau_rate * counting.bin_duration);
      }
      return std::pair{spec, records};
    };

    fmt::print(out, "seed {}, plateau {} Hz, {} s bins\n", counting.rng_seed, counting.plateau_rate,
               counting.bin_duration);

    double m1_width = 0.0;
    for (auto [sign, reference] : {std::pair{FringeSign::Peak, "0.92 +- 0.02"},
                                   std::pair{FringeSign::Dip, "0.93 +- 0.02"}}) {
      const auto [spec, records] = sampled(Preset::Fig2a, sign);
      const auto fit = fit_triangle(records);
      if (sign == FringeSign::Dip) m1_width = fit.half_width;
      fmt::print(out, "fig2a {:4}  V = {:.3f} +- {:.3f}  configured {:.2f}  reference {}\n",
                 sign == FringeSign::Peak ? "peak" : "dip", fit.visibility, fit.sigma_visibility,
                 spec.source.visibility(), reference);
    }
    {
      const auto [spec, records] = sampled(Preset::Fig2b, FringeSign::Dip);
      const auto fit = fit_enveloped_fringe(records);
      fmt::print(out, "fig2b       envelope FWHM = {:.1f} um, ratio to fig2a = {:.3f}  reference 2\n",
                 fit.half_width / micrometre, fit.half_width / m1_width);
    }
    {
      const auto [spec, records] = sampled(Preset::Fig2c, FringeSign::Peak);
      const auto fit = fit_fringe(records);
      fmt::print(out,
                 "fig2c       period = {:.2f} +- {:.2f} nm  reference 812.4 nm; V = {:.3f} +- {:.3f}  "
                 "configured {:.2f}\n",
                 fit.period / nanometre, fit.sigma_period / nanometre, fit.visibility,
                 fit.sigma_visibility, spec.source.visibility());
    }
    {
      const auto [spec, records] = sampled(Preset::Fig2d, FringeSign::Peak);
      const auto fit = fit_polarization_curve(records);
      fmt::print(out, "fig2d       V = {:.3f} +- {:.3f}  configured {:.2f}\n", fit.visibility,
                 fit.sigma_visibility, spec.source.visibility());
    }
    {
      const auto [spec, records] = sampled(Preset::Fig3, FringeSign::Peak);
      const auto beat = estimate_beat_frequency(records, 2.0 * preset_pump_wavelength);
      fmt::print(out,
                 "fig3        delta f = {:.4f} +- {:.4f} THz  configured {:.4f}  reference 0.69 +- 0.01; "
                 "delta lambda = {:.3f} nm  reference 1.52\n",
                 beat.delta_f * 1e-12, beat.sigma_delta_f * 1e-12, spec.source.beat_frequency() * 1e-12,
                 beat.delta_lambda / nanometre);
    }
    {
      const auto [spec, records] = sampled(Preset::Fig4, FringeSign::Dip);
      const auto c = fit_envelope_center(records);
      StageConfig apex = spec.fixed;
      apex.dx1 = c.center;
      const auto delays = stage_to_delays(apex);
      fmt::print(out,
                 "fig4        center = {:.4f} +- {:.4f} mm  configured dx0 {:.3f} mm; path difference at "
                 "apex = {:.4f} mm  reference 2 dx0\n",
                 c.center / millimetre, c.sigma / millimetre, spec.fixed.dx0 / millimetre,
                 (delays.long_path_l - delays.long_path_u) / millimetre);
    }
    return int{exit_ok};
  });
}

}  // namespace franson
