#include <cmath>

#include "doctest.h"
#include "franson/constants.hpp"
#include "franson/spectral.hpp"

using namespace franson;

namespace {

const double tw = 200e-6 / speed_of_light;

SpectralModel<double> sinc2() { return {SpectralKind::SincSquared, tw}; }
SpectralModel<double> gauss() { return {SpectralKind::Gaussian, 1e-12}; }
SpectralModel<double> flat() { return {SpectralKind::RectangularDensity, tw}; }

}  // namespace

TEST_CASE("model rejects a non-positive correlation width") {
  CHECK_THROWS_AS(SpectralModel<double>(SpectralKind::SincSquared, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralModel<double>(SpectralKind::Gaussian, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpectralModel<double>(SpectralKind::Gaussian, NAN), std::invalid_argument);
}

TEST_CASE("spectral density: peak, support and Gaussian sigma point") {
  const auto m = sinc2();
  const double s0 = spectral_density(m, 0.0);
  for (double nu : {1e9, 1e11, 3e12, -7e12}) {
    CHECK(spectral_density(m, nu) <= s0);
    CHECK(spectral_density(m, nu) == doctest::Approx(spectral_density(m, -nu)).epsilon(1e-15));
  }

  const auto r = flat();
  CHECK(spectral_density(r, 1.5 * r.band_half_width()) == 0.0);
  CHECK(spectral_density(r, 0.5 * r.band_half_width()) > 0.0);

  // S(0) = 3.9894228040143277e-13 and S(sigma_nu) = 2.419707245191434e-13 for
  // sigma_tau = 1 ps (independent closed-form evaluation).
  const auto g = gauss();
  CHECK(spectral_density(g, 0.0) == doctest::Approx(3.9894228040143277e-13).epsilon(1e-14));
  CHECK(spectral_density(g, 1e12) == doctest::Approx(2.419707245191434e-13).epsilon(1e-14));
}

TEST_CASE("triangle envelope for the sinc-squared density") {
  const auto m = sinc2();
  CHECK(correlation_envelope(m, 0.0) == 1.0);
  CHECK(correlation_envelope(m, tw / 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(correlation_envelope(m, 1.2 * tw) == 0.0);

  for (int i = 0; i <= 1000; ++i) {
    const double tau = -2.0 * tw + 4.0 * tw * i / 1000.0;
    const double expected = std::max(0.0, 1.0 - std::abs(tau) / tw);
    CHECK(correlation_envelope(m, tau) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("envelope is bounded, even and normalized for every kind") {
  for (const auto& m : {sinc2(), gauss(), flat()}) {
    const double w = m.correlation_width();
    CHECK(correlation_envelope(m, 0.0) == 1.0);
    for (int i = 1; i <= 200; ++i) {
      const double tau = 3.0 * w * i / 200.0;
      const double g = correlation_envelope(m, tau);
      CHECK(std::abs(g) <= 1.0);
      CHECK(g == correlation_envelope(m, -tau));
    }
  }
}

TEST_CASE("quadrature reproduces the closed forms") {
  // Gaussian at one sigma: scipy quad gives 0.6065306597126336.
  const auto g = gauss();
  CHECK(envelope_numeric(g, 1e-12) == doctest::Approx(0.6065306597126336).epsilon(1e-9));

  // Flat density: sin(D tau)/(D tau) at D tau = 0.3, 1, 2.5, 7 from scipy quad.
  const auto r = flat();
  const double d = r.band_half_width();
  const double expected[] = {0.9850673555377985, 0.8414709848078965, 0.23938885764158258,
                             0.09385522838839837};
  const double args[] = {0.3, 1.0, 2.5, 7.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(envelope_numeric(r, args[i] / d) - expected[i]) < 1e-6);
  }

  // Triangle midpoint; mpmath quadosc gives 0.5.
  CHECK(std::abs(envelope_numeric(sinc2(), tw / 2) - 0.5) < 1e-6);
}

TEST_CASE("density normalization to 1e-9 for every kind") {
  for (const auto& m : {sinc2(), gauss(), flat()}) {
    CHECK(std::abs(density_integral(m) - 1.0) <= 1e-9);
  }
}

TEST_CASE("numeric and closed-form envelopes agree on [-2T, 2T]") {
  for (const auto& m : {sinc2(), gauss(), flat()}) {
    const double w = m.correlation_width();
    for (int i = 0; i <= 80; ++i) {
      const double tau = -2.0 * w + 4.0 * w * i / 80.0;
      CHECK(std::abs(envelope_numeric(m, tau) - correlation_envelope(m, tau)) <= 1e-6);
    }
  }
}

TEST_CASE("quadrature reports non-convergence") {
  QuadratureOptions tight;
  tight.initial_intervals = 8;
  tight.max_doublings = 1;
  tight.tolerance = 0.0;
  tight.convergence_limit = 1e-12;
  CHECK_THROWS_AS(envelope_numeric(sinc2(), 0.3 * tw, tight), QuadratureNotConverged);
}

TEST_CASE("sine integral against reference values") {
  // Abramowitz & Stegun Table 5.1.
  CHECK(sine_integral(0.5) == doctest::Approx(0.4931074180430667).epsilon(1e-14));
  CHECK(sine_integral(1.0) == doctest::Approx(0.9460830703671830).epsilon(1e-14));
  CHECK(sine_integral(5.0) == doctest::Approx(1.5499312449446741).epsilon(1e-13));
  CHECK(sine_integral(20.0) == doctest::Approx(1.5482417010434398).epsilon(1e-13));
  CHECK(sine_integral_tail(2.0) == doctest::Approx(pi / 2 - 1.6054129768026948).epsilon(1e-12));
}
