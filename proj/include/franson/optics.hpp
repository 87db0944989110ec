#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "franson/constants.hpp"
#include "franson/errors.hpp"

namespace franson {

/// H/V components of a single photon's polarization.
template <typename Scalar>
using JonesVector = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar>
using JonesMatrix = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
JonesVector<Scalar> horizontal() {
  return JonesVector<Scalar>(1, 0);
}

template <typename Scalar>
JonesVector<Scalar> vertical() {
  return JonesVector<Scalar>(0, 1);
}

/// Linear polarization at `angle` from the H axis.
template <typename Scalar>
JonesVector<Scalar> linear_state(Scalar angle) {
  return JonesVector<Scalar>(std::cos(angle), std::sin(angle));
}

template <typename Scalar>
JonesMatrix<Scalar> rotation(Scalar angle) {
  const Scalar c = std::cos(angle), s = std::sin(angle);
  JonesMatrix<Scalar> m;
  m << c, -s, s, c;
  return m;
}

/// Linear retarder with its fast axis at `angle`.
template <typename Scalar>
JonesMatrix<Scalar> retarder(Scalar angle, Scalar retardance) {
  JonesMatrix<Scalar> phases = JonesMatrix<Scalar>::Zero();
  phases(0, 0) = std::polar(Scalar(1), -retardance / 2);
  phases(1, 1) = std::polar(Scalar(1), retardance / 2);
  return rotation(angle) * phases * rotation(-angle);
}

template <typename Scalar>
JonesMatrix<Scalar> half_wave_plate(Scalar angle) {
  return retarder(angle, std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
JonesMatrix<Scalar> quarter_wave_plate(Scalar angle) {
  return retarder(angle, std::numbers::pi_v<Scalar> / 2);
}

/// Rank-1 projector onto linear polarization at `angle`.
template <typename Scalar>
JonesMatrix<Scalar> linear_polarizer(Scalar angle) {
  const JonesVector<Scalar> axis = linear_state(angle);
  return axis * axis.adjoint();
}

// ---------------------------------------------------------------------------
// Elements

template <typename Scalar>
struct HalfWavePlate {
  Scalar angle;
};

template <typename Scalar>
struct QuarterWavePlate {
  Scalar angle;
};

template <typename Scalar>
struct Polarizer {
  Scalar angle;
};

/// Free-space propagation; only adds optical path.
template <typename Scalar>
struct DelaySegment {
  Scalar length;
};

template <typename Scalar>
struct PhaseShift {
  Scalar phase;
};

/// Single-output elements that make up an interferometer arm. The
/// polarizing beamsplitter branches, so it lives in LocalInterferometer.
template <typename Scalar>
using Element = std::variant<HalfWavePlate<Scalar>, QuarterWavePlate<Scalar>, Polarizer<Scalar>,
                             DelaySegment<Scalar>, PhaseShift<Scalar>>;

template <typename Scalar>
JonesMatrix<Scalar> jones_matrix(const Element<Scalar>& element) {
  struct Visitor {
    JonesMatrix<Scalar> operator()(const HalfWavePlate<Scalar>& e) const {
      return half_wave_plate(e.angle);
    }
    JonesMatrix<Scalar> operator()(const QuarterWavePlate<Scalar>& e) const {
      return quarter_wave_plate(e.angle);
    }
    JonesMatrix<Scalar> operator()(const Polarizer<Scalar>& e) const {
      return linear_polarizer(e.angle);
    }
    JonesMatrix<Scalar> operator()(const DelaySegment<Scalar>&) const {
      return JonesMatrix<Scalar>::Identity();
    }
    JonesMatrix<Scalar> operator()(const PhaseShift<Scalar>& e) const {
      return JonesMatrix<Scalar>::Identity() * std::polar(Scalar(1), e.phase);
    }
  };
  return std::visit(Visitor{}, element);
}

template <typename Scalar>
JonesVector<Scalar> transfer(const Element<Scalar>& element, const JonesVector<Scalar>& p) {
  return jones_matrix(element) * p;
}

template <typename Scalar>
struct PortPair {
  JonesVector<Scalar> transmitted;
  JonesVector<Scalar> reflected;
};

/// Polarizing beamsplitter: H is transmitted, V is reflected, no phase.
template <typename Scalar>
PortPair<Scalar> split_polarizing(const JonesVector<Scalar>& p) {
  return {JonesVector<Scalar>(p(0), 0), JonesVector<Scalar>(0, p(1))};
}

// ---------------------------------------------------------------------------
// Local interferometers

enum class Splitter { Polarizing, NonPolarizing };

/// T (short, transmitted) and R (long, roundtrip) alternatives.
enum class Arm { Short, Long };

template <typename Scalar>
struct LocalInterferometer {
  Splitter splitter = Splitter::Polarizing;
  std::vector<Element<Scalar>> short_arm;
  std::vector<Element<Scalar>> long_arm;
};

template <typename Scalar>
struct ArmOutput {
  JonesVector<Scalar> polarization;
  Scalar optical_path = 0;
};

template <typename Scalar>
ArmOutput<Scalar> propagate(std::span<const Element<Scalar>> arm, JonesVector<Scalar> p) {
  Scalar path = 0;
  for (const auto& element : arm) {
    if (const auto* delay = std::get_if<DelaySegment<Scalar>>(&element)) path += delay->length;
    p = transfer(element, p);
  }
  return {p, path};
}

template <typename Scalar>
struct ArmAmplitude {
  Arm arm;
  JonesVector<Scalar> polarization;
  Scalar optical_path;
};

/// Routes one photon through a local interferometer and returns the
/// alternatives that reach its output port. Alternatives with an exactly
/// zero amplitude are dropped.
///
/// Polarizing mode is a PBS with a mirror arm on each output: each arm
/// must turn the polarization by 90 degrees on its round trip so the photon
/// leaves through the fourth port (reflected if it came back from the
/// transmitted arm, transmitted if it came back from the reflected arm).
/// Non-polarizing mode is a lossless 50:50 split with both arms reaching
/// the output.
template <typename Scalar>
std::vector<ArmAmplitude<Scalar>> route(const LocalInterferometer<Scalar>& interferometer,
                                        const JonesVector<Scalar>& input) {
  std::vector<ArmAmplitude<Scalar>> out;
  auto keep = [&out](Arm arm, const ArmOutput<Scalar>& result) {
    if (result.polarization.squaredNorm() != Scalar(0)) {
      out.push_back({arm, result.polarization, result.optical_path});
    }
  };

  if (interferometer.splitter == Splitter::Polarizing) {
    const PortPair<Scalar> in = split_polarizing(input);
    if (in.transmitted.squaredNorm() != Scalar(0)) {
      auto back = propagate<Scalar>(interferometer.short_arm, in.transmitted);
      back.polarization = split_polarizing(back.polarization).reflected;
      keep(Arm::Short, back);
    }
    if (in.reflected.squaredNorm() != Scalar(0)) {
      auto back = propagate<Scalar>(interferometer.long_arm, in.reflected);
      back.polarization = split_polarizing(back.polarization).transmitted;
      keep(Arm::Long, back);
    }
  } else {
    const JonesVector<Scalar> half = input / std::sqrt(Scalar(2));
    keep(Arm::Short, propagate<Scalar>(interferometer.short_arm, half));
    keep(Arm::Long, propagate<Scalar>(interferometer.long_arm, half));
  }
  return out;
}

/// PBS interferometer with a double-passed quarter-wave plate at 45 degrees
/// in each arm; the long arm carries `long_path` of extra optical path and an
/// optional phase.
template <typename Scalar>
LocalInterferometer<Scalar> pbs_interferometer(Scalar long_path, Scalar long_phase = 0) {
  const Scalar axis = std::numbers::pi_v<Scalar> / 4;
  LocalInterferometer<Scalar> li;
  li.splitter = Splitter::Polarizing;
  li.short_arm = {QuarterWavePlate<Scalar>{axis}, QuarterWavePlate<Scalar>{axis}};
  li.long_arm = {QuarterWavePlate<Scalar>{axis}, DelaySegment<Scalar>{long_path},
                 QuarterWavePlate<Scalar>{axis}};
  if (long_phase != 0) li.long_arm.push_back(PhaseShift<Scalar>{long_phase});
  return li;
}

template <typename Scalar>
LocalInterferometer<Scalar> unpolarized_interferometer(Scalar long_path) {
  LocalInterferometer<Scalar> li;
  li.splitter = Splitter::NonPolarizing;
  li.long_arm = {DelaySegment<Scalar>{long_path}};
  return li;
}

template <typename Scalar>
struct FransonCircuit {
  LocalInterferometer<Scalar> upper;
  LocalInterferometer<Scalar> lower;
};

/// Extra path (and phase) of one long arm relative to its short arm.
template <typename Scalar>
struct LongArm {
  Scalar length = 0;
  Scalar phase = 0;
};

template <typename Scalar>
FransonCircuit<Scalar> franson_circuit(const LongArm<Scalar>& upper, const LongArm<Scalar>& lower) {
  return {pbs_interferometer(upper.length, upper.phase),
          pbs_interferometer(lower.length, lower.phase)};
}

// ---------------------------------------------------------------------------
// Two-photon input and path enumeration

enum class PolarizationLabel { H, V, D, A, R, L };

template <typename Scalar>
struct InputTerm {
  std::complex<Scalar> coefficient;
  PolarizationLabel upper;
  PolarizationLabel lower;
  /// Source-side delays of each photon in this term [s].
  Scalar offset_u = 0;
  Scalar offset_l = 0;
};

template <typename Scalar>
struct TwoPhotonInput {
  std::vector<InputTerm<Scalar>> terms;
};

/// (|H>u|H>l + |V>u|V>l)/sqrt2 at the interferometer inputs. A source path
/// offset dx0 makes the HH lower photon and the VV upper photon late by
/// dx0/c.
template <typename Scalar>
TwoPhotonInput<Scalar> entangled_input(Scalar source_path_offset = 0) {
  const Scalar amp = 1 / std::sqrt(Scalar(2));
  const Scalar delay = source_path_offset / Scalar(speed_of_light);
  return {{{amp, PolarizationLabel::H, PolarizationLabel::H, Scalar(0), delay},
           {amp, PolarizationLabel::V, PolarizationLabel::V, delay, Scalar(0)}}};
}

/// One two-photon detection alternative.
template <typename Scalar>
struct PathAmplitude {
  std::complex<Scalar> coeff;
  /// Propagation delays inside the interferometers [s].
  Scalar tau_u = 0;
  Scalar tau_l = 0;
  JonesVector<Scalar> pol_u;
  JonesVector<Scalar> pol_l;
  Scalar term_offset_u = 0;
  Scalar term_offset_l = 0;
  Arm arm_u = Arm::Short;
  Arm arm_l = Arm::Short;
  Scalar optical_path_u = 0;
  Scalar optical_path_l = 0;
  std::size_t term = 0;

  /// k_u L_u + k_l L_l, the phase the interferometer paths add at the
  /// center frequencies.
  Scalar optical_phase(Scalar k_u, Scalar k_l) const {
    return k_u * optical_path_u + k_l * optical_path_l;
  }
};

template <typename Scalar>
JonesVector<Scalar> basis_state(PolarizationLabel label) {
  switch (label) {
    case PolarizationLabel::H: return horizontal<Scalar>();
    case PolarizationLabel::V: return vertical<Scalar>();
    default: break;
  }
  throw InvalidState("input terms must use H/V basis labels");
}

template <typename Scalar>
std::vector<PathAmplitude<Scalar>> enumerate_paths(const TwoPhotonInput<Scalar>& input,
                                                   const FransonCircuit<Scalar>& circuit) {
  using std::abs;
  Scalar norm = 0;
  for (const auto& term : input.terms) norm += std::norm(term.coefficient);
  if (input.terms.empty() || abs(norm - 1) > Scalar(1e-12)) {
    throw InvalidState("two-photon input is not normalized");
  }

  const Scalar c = speed_of_light;
  std::vector<PathAmplitude<Scalar>> paths;
  for (std::size_t t = 0; t < input.terms.size(); ++t) {
    const auto& term = input.terms[t];
    const auto upper = route(circuit.upper, basis_state<Scalar>(term.upper));
    const auto lower = route(circuit.lower, basis_state<Scalar>(term.lower));
    for (const auto& u : upper) {
      for (const auto& l : lower) {
        PathAmplitude<Scalar> p;
        p.coeff = term.coefficient;
        p.tau_u = u.optical_path / c;
        p.tau_l = l.optical_path / c;
        p.pol_u = u.polarization;
        p.pol_l = l.polarization;
        p.term_offset_u = term.offset_u;
        p.term_offset_l = term.offset_l;
        p.arm_u = u.arm;
        p.arm_l = l.arm;
        p.optical_path_u = u.optical_path;
        p.optical_path_l = l.optical_path;
        p.term = t;
        paths.push_back(p);
      }
    }
  }
  return paths;
}

template <typename Scalar>
std::vector<PathAmplitude<Scalar>> enumerate_paths(const TwoPhotonInput<Scalar>& input,
                                                   const LongArm<Scalar>& upper,
                                                   const LongArm<Scalar>& lower) {
  return enumerate_paths(input, franson_circuit(upper, lower));
}

}  // namespace franson
