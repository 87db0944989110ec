#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "franson/scenarios.hpp"

using namespace franson;

namespace {

constexpr Preset all_presets[] = {Preset::Fig2a, Preset::Fig2b, Preset::Fig2c,
                                  Preset::Fig2d, Preset::Fig3,  Preset::Fig4};

// Full width at half depth of a sampled triangle around the plateau 1/2.
double half_depth_width(const ScanResult& r) {
  std::size_t extreme = 0;
  for (std::size_t i = 0; i < r.probabilities.size(); ++i) {
    if (std::abs(r.probabilities[i] - 0.5) > std::abs(r.probabilities[extreme] - 0.5)) extreme = i;
  }
  const double half = 0.5 * std::abs(r.probabilities[extreme] - 0.5);
  auto crossing = [&](int dir) {
    std::size_t i = extreme;
    while (true) {
      const std::size_t j = dir > 0 ? i + 1 : i - 1;
      const double a = std::abs(r.probabilities[i] - 0.5);
      const double b = std::abs(r.probabilities[j] - 0.5);
      if (b <= half) {
        return r.positions[i] + (r.positions[j] - r.positions[i]) * (a - half) / (a - b);
      }
      i = j;
    }
  };
  return crossing(1) - crossing(-1);
}

}  // namespace

TEST_CASE("stage mapping") {
  StageConfig cfg;
  cfg.dx1 = 10e-6;
  auto d = stage_to_delays(cfg);
  CHECK(d.long_path_u == doctest::Approx(-10e-6));
  CHECK(d.long_path_l == doctest::Approx(10e-6));

  cfg = {};
  cfg.dx2 = 0.2e-6;
  d = stage_to_delays(cfg);
  CHECK(d.long_path_u == doctest::Approx(0.2e-6));
  CHECK(d.long_path_l == 0.0);

  cfg = {};
  cfg.dx1 = 10e-6;
  cfg.geometry_factor = 2.0;
  d = stage_to_delays(cfg);
  CHECK(d.long_path_u == doctest::Approx(-20e-6));

  cfg.geometry_factor = 0.0;
  CHECK_THROWS_AS(stage_paths(cfg), std::invalid_argument);
}

TEST_CASE("preset names round trip") {
  for (Preset p : all_presets) CHECK(parse_preset(to_string(p)) == p);
  CHECK_FALSE(parse_preset("fig5").has_value());
  CHECK_THROWS_AS(preset_spec(Preset::Custom), std::invalid_argument);
}

TEST_CASE("grid sizing") {
  CHECK(Grid{0, 1, 0.25}.size() == 5);
  CHECK(Grid::spanning(-1, 1, 200).size() == 201);
  CHECK(Grid{0, 1, 0.3}.size() == 4);
  CHECK(Grid{1, 0, 0.1}.size() == 0);
  CHECK(Grid{0, 1, 0}.size() == 0);
}

TEST_CASE("every preset matches its closed-form reference") {
  for (Preset p : all_presets) {
    for (FringeSign sign : {FringeSign::Peak, FringeSign::Dip}) {
      const auto spec = preset_spec(p, sign);
      const auto r = run_scan(spec);
      REQUIRE(r.positions.size() == spec.grid.size());
      CHECK(r.warnings.empty());
      double worst = 0.0;
      for (std::size_t i = 0; i < r.positions.size(); ++i) {
        worst = std::max(worst, std::abs(r.probabilities[i] - oracle_probability(spec, r.positions[i])));
      }
      INFO(to_string(p));
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("Fig2a peak and dip extremes") {
  const auto peak = run_scan(preset_spec(Preset::Fig2a, FringeSign::Peak));
  CHECK(*std::max_element(peak.probabilities.begin(), peak.probabilities.end()) ==
        doctest::Approx(0.5 * 1.92).epsilon(1e-12));
  const auto dip = run_scan(preset_spec(Preset::Fig2a, FringeSign::Dip));
  CHECK(*std::min_element(dip.probabilities.begin(), dip.probabilities.end()) ==
        doctest::Approx(0.5 * 0.07).epsilon(1e-12));
  // Wings at the edge of the window sit on the plateau.
  CHECK(dip.probabilities.front() == doctest::Approx(0.5));
  CHECK(dip.probabilities.back() == doctest::Approx(0.5));
}

TEST_CASE("Fig4 feature is centred on dx0") {
  const auto spec = preset_spec(Preset::Fig4, FringeSign::Dip);
  const auto r = run_scan(spec);
  const auto it = std::min_element(r.probabilities.begin(), r.probabilities.end());
  const double at = r.positions[static_cast<std::size_t>(it - r.probabilities.begin())];
  CHECK(std::abs(at - preset_source_offset) <= spec.grid.step / 2);
  // The reference position dx1 = 0 is on the plateau.
  CHECK(oracle_probability(spec, 0.0) == doctest::Approx(0.5));
  CHECK(r.conditions[static_cast<std::size_t>(it - r.probabilities.begin())].condition_i);
}

TEST_CASE("Fig2d correlation curve peaks at theta2 = theta1") {
  const auto spec = preset_spec(Preset::Fig2d, FringeSign::Peak);
  const auto r = run_scan(spec);
  const auto it = std::max_element(r.probabilities.begin(), r.probabilities.end());
  const double at = r.positions[static_cast<std::size_t>(it - r.probabilities.begin())];
  const double off = std::remainder(at - spec.fixed.theta1, pi);
  CHECK(std::abs(off) <= spec.grid.step / 2 + 1e-12);
  CHECK(*it == doctest::Approx(0.5 * 1.94));
}

TEST_CASE("Fig2c phase scan period is one wavelength") {
  const auto spec = preset_spec(Preset::Fig2c, FringeSign::Peak);
  const auto r = run_scan(spec);
  std::vector<double> maxima;
  for (std::size_t i = 0; i < r.positions.size(); ++i) {
    const bool left = i == 0 || r.probabilities[i] > r.probabilities[i - 1];
    const bool right = i + 1 == r.positions.size() || r.probabilities[i] > r.probabilities[i + 1];
    if (left && right) maxima.push_back(r.positions[i]);
  }
  REQUIRE(maxima.size() == 3);
  const double lambda = spec.source.center_wavelength_l();
  CHECK(maxima[1] == doctest::Approx(0.0).scale(lambda).epsilon(1e-9));
  CHECK(maxima[2] - maxima[1] == doctest::Approx(lambda).epsilon(1e-9));
  CHECK(maxima[1] - maxima[0] == doctest::Approx(lambda).epsilon(1e-9));
}

TEST_CASE("M1 triangle is half as wide as the single-arm envelope") {
  const auto m1 = run_scan(preset_spec(Preset::Fig2a, FringeSign::Dip));
  const auto arm = preset_spec(Preset::Fig2b, FringeSign::Dip);
  const double width_m1 = half_depth_width(m1);
  CHECK(width_m1 == doctest::Approx(preset_coherence_length / 2).epsilon(1e-3));
  const auto& model = arm.source.spectral();
  // Single-arm half-depth points at |dx2| = c T_w / 2.
  CHECK(correlation_envelope(model, preset_coherence_length / 2 / speed_of_light) ==
        doctest::Approx(0.5));
  CHECK(width_m1 / preset_coherence_length == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("coarse grids raise a warning") {
  auto spec = preset_spec(Preset::Fig2b, FringeSign::Dip);
  spec.grid.step = spec.source.center_wavelength_u() / 4;
  const auto r = run_scan(spec, {{}, 2});
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings.front().rfind("GridTooCoarse", 0) == 0);

  auto fine = preset_spec(Preset::Fig3, FringeSign::Dip);
  CHECK(run_scan(fine).warnings.empty());
  fine.grid.step *= 20;
  CHECK(run_scan(fine).warnings.size() == 1);
}

TEST_CASE("parallel scans reproduce the serial result bit for bit") {
  const auto spec = preset_spec(Preset::Fig2b, FringeSign::Peak);
  const auto serial = run_scan(spec, {{}, 1});
  for (unsigned threads : {2u, 3u, 8u}) {
    const auto parallel = run_scan(spec, {{}, threads});
    CHECK(parallel.probabilities == serial.probabilities);
    CHECK(parallel.positions == serial.positions);
  }
}

TEST_CASE("geometry factor rescales the stage axis") {
  const auto src = preset_source(Preset::Fig2a, FringeSign::Dip);
  const auto folded = preset_spec(Preset::Fig2a, FringeSign::Dip, src, 2.0);
  const auto r = run_scan(folded);
  CHECK(half_depth_width(r) == doctest::Approx(preset_coherence_length / 4).epsilon(1e-3));
  for (std::size_t i = 0; i < r.positions.size(); i += 10) {
    CHECK(std::abs(r.probabilities[i] - oracle_probability(folded, r.positions[i])) <= 1e-6);
  }
}
