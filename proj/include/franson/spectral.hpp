#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "franson/errors.hpp"
#include "franson/special_functions.hpp"

namespace franson {

/// Shape of the biphoton spectral density as a function of the detuning
/// nu, with omega_u = omega_u0 + nu and omega_l = omega_l0 - nu.
///
///  - SincSquared: Fourier pair of a rectangular two-photon wave function of
///    full width T. The envelope is the triangle max(0, 1 - |tau|/T).
///  - Gaussian: temporal standard deviation T, envelope exp(-tau^2 / 2T^2).
///  - RectangularDensity: flat density on |nu| <= pi/T, envelope
///    sin(pi tau/T) / (pi tau/T), first zero at tau = T.
enum class SpectralKind { SincSquared, Gaussian, RectangularDensity };

inline std::string_view to_string(SpectralKind kind) {
  switch (kind) {
    case SpectralKind::SincSquared: return "sinc_squared";
    case SpectralKind::Gaussian: return "gaussian";
    case SpectralKind::RectangularDensity: return "rectangular_density";
  }
  return "unknown";
}

template <typename Scalar>
class SpectralModel {
 public:
  SpectralModel(SpectralKind kind, Scalar correlation_width)
      : kind_(kind), width_(correlation_width) {
    if (!(correlation_width > 0) || !std::isfinite(correlation_width)) {
      throw std::invalid_argument("correlation_width must be positive and finite");
    }
  }

  SpectralKind kind() const { return kind_; }

  /// T_w in seconds.
  Scalar correlation_width() const { return width_; }

  /// Half-width of the detuning band of a flat density.
  Scalar band_half_width() const { return std::numbers::pi_v<Scalar> / width_; }

 private:
  SpectralKind kind_;
  Scalar width_;
};

/// S(nu): nonnegative, even, unit integral.
template <typename Scalar>
Scalar spectral_density(const SpectralModel<Scalar>& model, Scalar nu) {
  using std::abs;
  const Scalar width = model.correlation_width();
  switch (model.kind()) {
    case SpectralKind::SincSquared: {
      const Scalar x = nu * width / 2;
      const Scalar sinc = x == 0 ? Scalar(1) : std::sin(x) / x;
      return width / (2 * std::numbers::pi_v<Scalar>) * sinc * sinc;
    }
    case SpectralKind::Gaussian: {
      const Scalar sigma_nu = 1 / width;
      const Scalar z = nu / sigma_nu;
      return std::exp(-z * z / 2) / (std::sqrt(2 * std::numbers::pi_v<Scalar>) * sigma_nu);
    }
    case SpectralKind::RectangularDensity: {
      const Scalar half = model.band_half_width();
      return abs(nu) <= half ? 1 / (2 * half) : Scalar(0);
    }
  }
  return 0;
}

/// g(tau), the cosine transform of S; closed forms for all three kinds.
template <typename Scalar>
Scalar correlation_envelope(const SpectralModel<Scalar>& model, Scalar tau) {
  using std::abs;
  const Scalar width = model.correlation_width();
  switch (model.kind()) {
    case SpectralKind::SincSquared: {
      const Scalar r = 1 - abs(tau) / width;
      return r > 0 ? r : Scalar(0);
    }
    case SpectralKind::Gaussian: {
      const Scalar z = tau / width;
      return std::exp(-z * z / 2);
    }
    case SpectralKind::RectangularDensity: {
      const Scalar x = model.band_half_width() * tau;
      return x == 0 ? Scalar(1) : std::sin(x) / x;
    }
  }
  return 0;
}

struct QuadratureOptions {
  std::size_t initial_intervals = 4096;
  int max_doublings = 14;
  /// Doubling stops once successive estimates differ by no more than this.
  double tolerance = 1e-12;
  /// Largest final change accepted when the doubling budget runs out.
  double convergence_limit = 1e-8;
};

namespace detail {

// Composite trapezoid on [0, upper], refined by interval doubling.
template <typename Scalar, typename F>
Scalar trapezoid_doubling(F&& f, Scalar upper, const QuadratureOptions& options) {
  using std::abs;
  std::size_t n = options.initial_intervals;
  Scalar h = upper / Scalar(n);
  Scalar sum = (f(Scalar(0)) + f(upper)) / 2;
  for (std::size_t i = 1; i < n; ++i) sum += f(h * Scalar(i));
  Scalar estimate = h * sum;

  Scalar change = std::numeric_limits<Scalar>::infinity();
  for (int level = 0; level < options.max_doublings; ++level) {
    Scalar midpoints = 0;
    for (std::size_t i = 0; i < n; ++i) midpoints += f(h * (Scalar(i) + Scalar(0.5)));
    sum += midpoints;
    n *= 2;
    h /= 2;
    const Scalar refined = h * sum;
    change = abs(refined - estimate);
    estimate = refined;
    if (change <= Scalar(options.tolerance)) return estimate;
  }
  if (change > Scalar(options.convergence_limit)) {
    throw QuadratureNotConverged("trapezoid doubling changed the result by " +
                                 std::to_string(double(change)));
  }
  return estimate;
}

// Integral of cos(a x)/x^2 from x0 to infinity.
template <typename Scalar>
Scalar cosine_over_square_tail(Scalar a, Scalar x0) {
  using std::abs;
  a = abs(a);
  if (a == 0) return 1 / x0;
  return std::cos(a * x0) / x0 - a * sine_integral_tail(a * x0);
}

}  // namespace detail

/// Quadrature value of the integral of S(nu) cos(nu tau). Integrates the
/// even integrand on the positive half line: +-8 sigma for Gaussian, the
/// band for RectangularDensity, and 64 lobes for SincSquared with the
/// remaining tail added in closed form through the sine integral.
template <typename Scalar>
Scalar envelope_numeric(const SpectralModel<Scalar>& model, Scalar tau,
                        const QuadratureOptions& options = {}) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar width = model.correlation_width();
  switch (model.kind()) {
    case SpectralKind::SincSquared: {
      // x = nu T / 2, S dnu = sinc^2(x) dx / pi.
      const Scalar r = 2 * tau / width;
      const Scalar cutoff = 64 * pi;
      auto integrand = [r](Scalar x) {
        const Scalar sinc = x == 0 ? Scalar(1) : std::sin(x) / x;
        return sinc * sinc * std::cos(r * x) / pi;
      };
      const Scalar body = 2 * detail::trapezoid_doubling(integrand, cutoff, options);
      // sin^2(x) cos(rx) = [cos(rx) - cos((2+r)x)/2 - cos((2-r)x)/2] / 2
      const Scalar tail = (detail::cosine_over_square_tail(r, cutoff) -
                           detail::cosine_over_square_tail(2 + r, cutoff) / 2 -
                           detail::cosine_over_square_tail(2 - r, cutoff) / 2) /
                          pi;
      return body + tail;
    }
    case SpectralKind::Gaussian: {
      // z = nu / sigma_nu, sigma_nu tau = tau / T.
      const Scalar scaled = tau / width;
      auto integrand = [scaled](Scalar z) {
        return std::exp(-z * z / 2) / std::sqrt(2 * pi) * std::cos(z * scaled);
      };
      return 2 * detail::trapezoid_doubling(integrand, Scalar(8), options);
    }
    case SpectralKind::RectangularDensity: {
      const Scalar phase = model.band_half_width() * tau;
      auto integrand = [phase](Scalar x) { return std::cos(x * phase) / 2; };
      return 2 * detail::trapezoid_doubling(integrand, Scalar(1), options);
    }
  }
  return 0;
}

/// Integral of S over all detunings, by the same quadrature.
template <typename Scalar>
Scalar density_integral(const SpectralModel<Scalar>& model,
                        const QuadratureOptions& options = {}) {
  return envelope_numeric(model, Scalar(0), options);
}

}  // namespace franson
