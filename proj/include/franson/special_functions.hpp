#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace franson {

/// Tail of the sine integral, the integral of sin(t)/t from z to infinity,
/// for z >= 0. Power series below z = 2, complex continued fraction for
/// E1(iz) above (modified Lentz).
template <typename Scalar>
Scalar sine_integral_tail(Scalar z) {
  using std::abs;
  constexpr Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  constexpr int max_iterations = 10000;

  if (z < Scalar(2)) {
    // Si(z) = sum_k (-1)^k z^(2k+1) / ((2k+1) (2k+1)!)
    Scalar term = z;  // z^(2k+1)/(2k+1)!
    Scalar sum = z;
    const Scalar z2 = z * z;
    for (int k = 1; k < max_iterations; ++k) {
      term *= -z2 / Scalar((2 * k) * (2 * k + 1));
      const Scalar add = term / Scalar(2 * k + 1);
      sum += add;
      if (abs(add) <= eps * abs(sum)) break;
    }
    return half_pi - sum;
  }

  using C = std::complex<Scalar>;
  constexpr Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
  C b(1, z);
  C c(1 / tiny, 0);
  C d = C(1, 0) / b;
  C h = d;
  for (int i = 2; i < max_iterations; ++i) {
    const Scalar a = -Scalar(i - 1) * Scalar(i - 1);
    b += Scalar(2);
    d = C(1, 0) / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (abs(del.real() - 1) + abs(del.imag()) < eps) break;
  }
  h *= C(std::cos(z), -std::sin(z));
  return -h.imag();
}

/// Sine integral Si(z) for z >= 0.
template <typename Scalar>
Scalar sine_integral(Scalar z) {
  return std::numbers::pi_v<Scalar> / 2 - sine_integral_tail(z);
}

}  // namespace franson
