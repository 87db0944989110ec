// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "franson/counts.hpp"
#include "franson/csv.hpp"
#include "franson/scenarios.hpp"

using namespace franson;

namespace {

constexpr std::uint64_t seed = 20240611;
constexpr Preset presets[] = {Preset::Fig2a, Preset::Fig2b, Preset::Fig2c,
                              Preset::Fig2d, Preset::Fig3,  Preset::Fig4};

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

CountingConfig counting(std::uint64_t s = seed) {
  CountingConfig c;
  c.plateau_rate = 2000.0;
  c.bin_duration = 1.0;
  c.rng_seed = s;
  return c;
}

std::vector<CountRecord> sampled(const ScanSpec& spec, std::uint64_t s = seed) {
  return sample_counts(run_scan(spec), counting(s));
}

double fringe_visibility(const std::vector<double>& p) {
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  return (*hi - *lo) / (*hi + *lo);
}

void oracle_equivalence() {
  double worst = 0.0;
  std::size_t points = 0;
  for (Preset p : presets) {
    for (FringeSign sign : {FringeSign::Peak, FringeSign::Dip}) {
      const auto spec = preset_spec(p, sign);
      const auto r = run_scan(spec);
      for (std::size_t i = 0; i < r.positions.size(); ++i) {
        worst = std::max(worst, std::abs(r.probabilities[i] - oracle_probability(spec, r.positions[i])));
      }
      points += r.positions.size();
    }
  }
  verdict(1, "closed-form equivalence on all preset grids", worst <= 1e-6,
          fmt::format("max |engine - closed form| = {:.2e} over {} points (tol 1e-6)", worst, points));
}

void fig2a() {
  bool ok = true;
  std::string detail;
  for (FringeSign sign : {FringeSign::Peak, FringeSign::Dip}) {
    const auto spec = preset_spec(Preset::Fig2a, sign);
    const auto exact = run_scan(spec);
    const auto extreme = sign == FringeSign::Peak
                             ? std::max_element(exact.probabilities.begin(), exact.probabilities.end())
                             : std::min_element(exact.probabilities.begin(), exact.probabilities.end());
    const double apex = exact.positions[static_cast<std::size_t>(extreme - exact.probabilities.begin())];
    const auto fit = fit_triangle(sample_counts(exact, counting()));
    const double v = spec.source.visibility();
    const bool this_ok = std::abs(apex) <= 1e-12 && std::abs(fit.center) <= spec.grid.step &&
                         std::abs(fit.visibility - v) <= 0.03;
    ok = ok && this_ok;
    detail += fmt::format("{} V={:.3f} fitted {:.3f} +- {:.3f}, apex {:.1e} m, fitted centre {:.2f} um; ",
                          sign == FringeSign::Peak ? "peak" : "dip", v, fit.visibility,
                          fit.sigma_visibility, apex, fit.center * 1e6);
  }
  verdict(2, "Fig2a triangle and visibility (tol 0.03)", ok, detail);
}

void fig2b() {
  const auto m1 = preset_spec(Preset::Fig2a, FringeSign::Dip);
  const auto arm = preset_spec(Preset::Fig2b, FringeSign::Dip);
  const double exact_ratio = fit_enveloped_fringe(exact_records(run_scan(arm))).half_width /
                             fit_triangle(exact_records(run_scan(m1))).half_width;
  const double noisy_ratio =
      fit_enveloped_fringe(sampled(arm)).half_width / fit_triangle(sampled(m1)).half_width;
  const bool ok = std::abs(exact_ratio - 2.0) <= 0.05 && std::abs(noisy_ratio - 2.0) <= 0.05;
  verdict(3, "Fig2b envelope FWHM twice the Fig2a width", ok,
          fmt::format("ratio {:.4f} noiseless, {:.4f} sampled (2.0 +- 0.05)", exact_ratio, noisy_ratio));
}

void fig2c() {
  const auto spec = preset_spec(Preset::Fig2c, FringeSign::Peak);
  const auto exact = fit_fringe(exact_records(run_scan(spec)));
  const auto noisy = fit_fringe(sampled(spec));
  const double target = 812.4e-9;
  const bool ok = std::abs(exact.period / target - 1) <= 0.01 &&
                  std::abs(noisy.period / target - 1) <= 0.01 &&
                  std::abs(noisy.visibility - 0.91) <= 0.03;
  verdict(4, "Fig2c fringe period and visibility", ok,
          fmt::format("period {:.2f} nm noiseless, {:.2f} nm sampled (812.4 +- 1%); "
                      "V {:.3f} +- {:.3f} sampled (0.91 +- 0.03)",
                      exact.period * 1e9, noisy.period * 1e9, noisy.visibility, noisy.sigma_visibility));
}

void fig2d() {
  const auto spec = preset_spec(Preset::Fig2d, FringeSign::Peak);
  const auto r = run_scan(spec);
  const double v = spec.source.visibility();
  const double top = oracle_probability(spec, spec.fixed.theta1);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.positions.size(); ++i) {
    const double law = (1 + v * std::cos(2 * (r.positions[i] - spec.fixed.theta1))) / (1 + v);
    worst = std::max(worst, std::abs(r.probabilities[i] / top - law));
  }
  const auto fit = fit_polarization_curve(sample_counts(r, counting()));
  const bool ok = worst <= 1e-9 && std::abs(fit.visibility - v) <= 0.02;
  verdict(5, "Fig2d polarization correlation", ok,
          fmt::format("shape error {:.1e} (tol 1e-9); V {:.3f} +- {:.3f} sampled ({:.2f} +- 0.02)", worst,
                      fit.visibility, fit.sigma_visibility, v));
}

void fig3() {
  const auto spec = preset_spec(Preset::Fig3, FringeSign::Peak);
  const double lambda = 2 * preset_pump_wavelength;
  const auto exact = estimate_beat_frequency(exact_records(run_scan(spec)), lambda);
  const auto noisy = estimate_beat_frequency(sampled(spec), lambda);
  const double target = 0.69e12;
  const bool ok = std::abs(exact.delta_f / target - 1) <= 0.01 &&
                  std::abs(noisy.delta_f - target) <= 0.01e12;
  verdict(6, "Fig3 beat frequency", ok,
          fmt::format("df {:.4f} THz noiseless (0.69 +- 1%), {:.4f} +- {:.4f} THz sampled (0.69 +- 0.01); "
                      "dlambda {:.3f} nm",
                      exact.delta_f * 1e-12, noisy.delta_f * 1e-12, noisy.sigma_delta_f * 1e-12,
                      noisy.delta_lambda * 1e9));
}

void fig4() {
  const auto spec = preset_spec(Preset::Fig4, FringeSign::Dip);
  const double dx0 = spec.fixed.dx0;
  const auto centre = fit_envelope_center(sampled(spec));
  const bool centre_ok = std::abs(centre.center - 1e-3) <= spec.grid.step;

  StageConfig apex = spec.fixed;
  apex.dx1 = centre.center;
  const auto fitted = stage_to_delays(apex);
  apex.dx1 = dx0;
  const auto exact = stage_to_delays(apex);
  const auto cond = check_interference_conditions(exact, spec.source);
  const double fitted_diff = fitted.long_path_l - fitted.long_path_u;
  const double exact_diff = exact.long_path_l - exact.long_path_u;
  const bool diff_ok = std::abs(exact_diff - 2 * dx0) <= 1e-15 &&
                       std::abs(fitted_diff - 2 * dx0) <= 2 * spec.grid.step && cond.condition_i &&
                       std::abs(cond.path_mismatch) <= 1e-15;

  auto theta_scan = [&](double dx1) {
    ScanSpec s = spec;
    s.axis = ScanAxis::Theta2;
    s.fixed.dx1 = dx1;
    s.grid = Grid::spanning(s.fixed.theta1 - pi, s.fixed.theta1 + pi, 100);
    return fringe_visibility(run_scan(s).probabilities);
  };
  const double degraded = theta_scan(0.0);
  const double recovered = theta_scan(dx0);
  const double v = spec.source.visibility();
  const bool ent_ok = degraded < 1e-6 && std::abs(recovered - v) <= 1e-9;
  verdict(7, "Fig4 envelope shift, path difference and entanglement recovery",
          centre_ok && diff_ok && ent_ok,
          fmt::format("centre {:.4f} mm (1.000 +- {:.4f}); L_l - L_u = {:.4f} mm at fitted apex, "
                      "{:.6f} mm at dx1 = dx0 (2 dx0 = {:.3f}); theta2 visibility {:.1e} at dx1 = 0, "
                      "{:.6f} at dx1 = dx0 (V = {:.2f})",
                      centre.center * 1e3, spec.grid.step * 1e3, fitted_diff * 1e3, exact_diff * 1e3,
                      2 * dx0 * 1e3, degraded, recovered, v));
}

void structural() {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> stage(-400e-6, 400e-6);
  std::uniform_real_distribution<double> small(-3e-6, 3e-6);
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SpectralKind kinds[] = {SpectralKind::SincSquared, SpectralKind::Gaussian,
                                SpectralKind::RectangularDensity};

  bool paths_ok = true, rr_ok = true;
  double complement = 0.0, below = 0.0, above = 0.0;
  for (int i = 0; i < 10000; ++i) {
    StageConfig cfg;
    cfg.dx0 = i % 4 == 0 ? stage(rng) : 0.0;
    cfg.dx1 = stage(rng);
    cfg.dx2 = small(rng);
    cfg.dx3 = small(rng);
    cfg.theta1 = angle(rng);
    cfg.theta2 = angle(rng);
    const SpectralModel<double> model(kinds[i % 3], (20e-6 + 3e-3 * unit(rng)) / speed_of_light);
    const auto source = BiphotonSource::with_split(preset_pump_wavelength, i % 2 ? 3e-9 * unit(rng) : 0.0,
                                                   model, unit(rng), cfg.dx0);
    const auto paths = stage_paths(cfg);
    paths_ok = paths_ok && paths.size() == 2;

    // RR phase with the mirror moved versus at rest.
    StageConfig rest = cfg;
    rest.dx1 = 0.0;
    const auto still = stage_paths(rest);
    for (std::size_t k = 0; k < paths.size(); ++k) {
      if (paths[k].arm_u == Arm::Long && paths[k].arm_l == Arm::Long) {
        const double moved = paths[k].optical_path_u + paths[k].optical_path_l;
        const double fixed = still[k].optical_path_u + still[k].optical_path_l;
        rr_ok = rr_ok && std::abs(moved - fixed) <= 4 * std::numeric_limits<double>::epsilon() * 1e-3;
      }
    }

    const double p = coincidence_probability(paths, source, {cfg.theta1, cfg.theta2});
    below = std::min(below, p);
    above = std::max(above, p - 1.0);
    const double plus = coincidence_probability(paths, source, {pi / 4, pi / 4});
    const double minus = coincidence_probability(paths, source, {pi / 4, -pi / 4});
    complement = std::max(complement, std::abs(plus + minus - 1.0));
  }

  // Phase insensitivity, parity and shift of the M1 scan.
  double insens = 0.0, parity = 0.0, shift = 0.0;
  const double v = 0.93;
  const auto base = preset_source(Preset::Fig2a, FringeSign::Dip).with_visibility(v);
  for (int i = -600; i <= 600; ++i) {
    StageConfig cfg;
    cfg.theta2 = -pi / 4;
    cfg.dx1 = i * 0.29e-6;
    const double p = engine_probability(cfg, base);
    const double tri = std::max(0.0, 1 - std::abs(2 * cfg.dx1 / preset_coherence_length));
    insens = std::max(insens, std::abs(p - 0.5 * (1 - v * tri)));
    StageConfig mirrored = cfg;
    mirrored.dx1 = -cfg.dx1;
    parity = std::max(parity, std::abs(p - engine_probability(mirrored, base)));
    StageConfig moved = cfg;
    moved.dx0 = 1e-3;
    moved.dx1 = cfg.dx1 + 1e-3;
    shift = std::max(shift, std::abs(p - engine_probability(moved, base)));
  }

  const bool ok = paths_ok && rr_ok && complement <= 1e-12 && below >= 0.0 && above <= 0.0 &&
                  insens <= 1e-9 && parity <= 1e-9 && shift <= 1e-9;
  verdict(8, "structural invariants", ok,
          fmt::format("two paths {}, RR phase fixed {}, max |P+ + P- - 1| {:.1e}, bounds [{:.1e}, 1{:+.1e}] "
                      "over 1e4 configs; M1 phase-insensitivity {:.1e}, parity {:.1e}, shift {:.1e} (tol 1e-9)",
                      paths_ok ? "yes" : "no", rr_ok ? "yes" : "no", complement, below, above, insens,
                      parity, shift));
}

void statistics() {
  auto spec = preset_spec(Preset::Fig2a, FringeSign::Dip);
  ScanResult flat{spec, std::vector<double>(10000, 0.0), std::vector<double>(10000, 0.37), {}, {}};
  for (std::size_t i = 0; i < flat.positions.size(); ++i) flat.positions[i] = static_cast<double>(i);
  const auto data = sample_counts(flat, counting());
  const double mu = 2 * 2000.0 * 0.37;
  double mean = 0.0;
  for (const auto& r : data) mean += static_cast<double>(*r.counts);
  mean /= 1e4;
  double var = 0.0;
  for (const auto& r : data) var += std::pow(static_cast<double>(*r.counts) - mean, 2);
  var /= 1e4 - 1;
  const double mean_z = (mean - mu) / std::sqrt(mu / 1e4);
  const double var_z = (var - mu) / (mu * std::sqrt(2.0 / (1e4 - 1)));

  auto csv = [&](unsigned threads) {
    ScanOptions o;
    o.threads = threads;
    std::ostringstream s;
    write_csv(s, sample_counts(run_scan(preset_spec(Preset::Fig3, FringeSign::Peak), o), counting()));
    return s.str();
  };
  const bool same = csv(1) == csv(1) && csv(1) == csv(4);

  const bool ok = std::abs(mean_z) < 5 && std::abs(var_z) < 5 && same;
  verdict(9, "counting statistics and determinism", ok,
          fmt::format("mean z = {:+.2f}, variance z = {:+.2f} over 1e4 bins (|z| < 5); "
                      "CSV bit-identical across runs: {}",
                      mean_z, var_z, same ? "yes" : "no"));
}

}  // namespace

int main() {
  const std::pair<void (*)(), const char*> criteria[] = {
      {oracle_equivalence, "closed-form equivalence"}, {fig2a, "Fig2a"}, {fig2b, "Fig2b"},
      {fig2c, "Fig2c"}, {fig2d, "Fig2d"}, {fig3, "Fig3"}, {fig4, "Fig4"},
      {structural, "structural invariants"}, {statistics, "statistics"}};
  int id = 0;
  for (const auto& [run, name] : criteria) {
    ++id;
    try {
      run();
    } catch (const std::exception& e) {
      verdict(id, name, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
