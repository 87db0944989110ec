#pragma once

#include <numbers>

namespace franson {

/// Speed of light in vacuum [m/s].
inline constexpr double speed_of_light = 299792458.0;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double nanometre = 1e-9;
inline constexpr double micrometre = 1e-6;
inline constexpr double millimetre = 1e-3;

inline constexpr double degree = std::numbers::pi / 180.0;

}  // namespace franson
