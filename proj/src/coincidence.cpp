#include "franson/coincidence.hpp"

#include <cmath>
#include <stdexcept>

#include "franson/constants.hpp"

namespace franson {

namespace {

constexpr double energy_tolerance = 1e-9;
constexpr double clamp_tolerance = 1e-12;
constexpr double protocol_tolerance = 1e-12;  // metres

double envelope(const BiphotonSource& source, double tau, const EngineOptions& options) {
  if (options.envelope == EnvelopeMethod::Quadrature) {
    return envelope_numeric(source.spectral(), tau, options.quadrature);
  }
  return correlation_envelope(source.spectral(), tau);
}

std::complex<double> analyzer_amplitude(const JonesVector<double>& pol, double angle) {
  return linear_state(angle).dot(pol);
}

bool is_multiple(double angle, double period) {
  const double r = std::remainder(angle, period);
  return std::abs(r) < 1e-9;
}

}  // namespace

BiphotonSource::BiphotonSource(double pump_wavelength, double center_wavelength_u,
                               double center_wavelength_l, SpectralModel<double> spectral,
                               double delta_x0, double visibility)
    : pump_wavelength_(pump_wavelength),
      lambda_u_(center_wavelength_u),
      lambda_l_(center_wavelength_l),
      spectral_(spectral),
      delta_x0_(delta_x0),
      visibility_(visibility) {
  if (!(pump_wavelength > 0) || !(center_wavelength_u > 0) || !(center_wavelength_l > 0)) {
    throw std::invalid_argument("wavelengths must be positive");
  }
  const double mismatch =
      (1.0 / center_wavelength_u + 1.0 / center_wavelength_l) * pump_wavelength - 1.0;
  if (std::abs(mismatch) > energy_tolerance) {
    throw std::invalid_argument("center wavelengths violate energy conservation with the pump");
  }
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("visibility must be in [0,1]");
  }
  if (!std::isfinite(delta_x0)) throw std::invalid_argument("delta_x0 must be finite");
}

BiphotonSource BiphotonSource::degenerate(double pump_wavelength, SpectralModel<double> spectral,
                                          double visibility, double delta_x0) {
  return {pump_wavelength, 2 * pump_wavelength, 2 * pump_wavelength, spectral, delta_x0,
          visibility};
}

BiphotonSource BiphotonSource::with_split(double pump_wavelength, double wavelength_split,
                                          SpectralModel<double> spectral, double visibility,
                                          double delta_x0) {
  // lambda_u + lambda_l = s, lambda_u lambda_l = lambda_p s.
  const double s = 2 * pump_wavelength +
                   std::sqrt(4 * pump_wavelength * pump_wavelength +
                             wavelength_split * wavelength_split);
  const double lambda_u = (s + wavelength_split) / 2;
  const double lambda_l = 1.0 / (1.0 / pump_wavelength - 1.0 / lambda_u);
  return {pump_wavelength, lambda_u, lambda_l, spectral, delta_x0, visibility};
}

double BiphotonSource::omega_u() const { return two_pi * speed_of_light / lambda_u_; }
double BiphotonSource::omega_l() const { return two_pi * speed_of_light / lambda_l_; }
double BiphotonSource::wavenumber_u() const { return two_pi / lambda_u_; }
double BiphotonSource::wavenumber_l() const { return two_pi / lambda_l_; }

double BiphotonSource::beat_frequency() const {
  return std::abs(speed_of_light / lambda_u_ - speed_of_light / lambda_l_);
}

BiphotonSource BiphotonSource::with_delta_x0(double delta_x0) const {
  BiphotonSource copy = *this;
  if (!std::isfinite(delta_x0)) throw std::invalid_argument("delta_x0 must be finite");
  copy.delta_x0_ = delta_x0;
  return copy;
}

BiphotonSource BiphotonSource::with_visibility(double visibility) const {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("visibility must be in [0,1]");
  }
  BiphotonSource copy = *this;
  copy.visibility_ = visibility;
  return copy;
}

CoincidenceTerms coincidence_terms(std::span<const PathAmplitude<double>> paths,
                                   const BiphotonSource& source, const AnalyzerSettings& analyzers,
                                   const EngineOptions& options) {
  const double plateau_angle = pi / 4;
  const double omega_u = source.omega_u();
  const double omega_l = source.omega_l();

  std::vector<std::complex<double>> amplitude(paths.size());
  CoincidenceTerms terms;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    amplitude[k] = p.coeff * analyzer_amplitude(p.pol_u, analyzers.theta1) *
                   analyzer_amplitude(p.pol_l, analyzers.theta2);
    terms.diagonal += std::norm(amplitude[k]);
    terms.plateau_weight += std::norm(p.coeff * analyzer_amplitude(p.pol_u, plateau_angle) *
                                      analyzer_amplitude(p.pol_l, plateau_angle));
  }

  // Each pair j<k contributes 2 Re[a_j a_k* exp(i(w_u du + w_l dl))] g(du - dl):
  // the detuning integral of exp(i nu (du - dl)) against the even density.
  for (std::size_t j = 0; j < paths.size(); ++j) {
    if (amplitude[j] == 0.0) continue;
    const double t_uj = paths[j].tau_u + paths[j].term_offset_u;
    const double t_lj = paths[j].tau_l + paths[j].term_offset_l;
    for (std::size_t k = j + 1; k < paths.size(); ++k) {
      if (amplitude[k] == 0.0) continue;
      const double du = t_uj - (paths[k].tau_u + paths[k].term_offset_u);
      const double dl = t_lj - (paths[k].tau_l + paths[k].term_offset_l);
      const double g = envelope(source, du - dl, options);
      if (g == 0.0) continue;
      const std::complex<double> carrier = std::polar(1.0, omega_u * du + omega_l * dl);
      terms.interference += 2.0 * std::real(amplitude[j] * std::conj(amplitude[k]) * carrier) * g;
    }
  }
  return terms;
}

double coincidence_probability(std::span<const PathAmplitude<double>> paths,
                               const BiphotonSource& source, const AnalyzerSettings& analyzers,
                               const EngineOptions& options) {
  const CoincidenceTerms terms = coincidence_terms(paths, source, analyzers, options);
  if (!(terms.plateau_weight > 0.0)) {
    throw NormalizationFailure("plateau normalizer vanishes for these paths");
  }
  const double p = (terms.diagonal + source.visibility() * terms.interference) /
                   (2.0 * terms.plateau_weight);
  if (p < 0.0) {
    if (p < -clamp_tolerance) throw NormalizationFailure("coincidence probability below zero");
    return 0.0;
  }
  if (p > 1.0) {
    if (p > 1.0 + clamp_tolerance) {
      throw NormalizationFailure(
          "coincidence probability exceeds one; the plateau normalization assumes the "
          "polarization-entangled circuit");
    }
    return 1.0;
  }
  return p;
}

double analytic_probability(double dx1, double dx2, double dx3, const BiphotonSource& source,
                            FringeSign sign, double geometry_factor) {
  const bool m1_moved = std::abs(dx1) > protocol_tolerance;
  const bool phase_moved =
      std::abs(dx2) > protocol_tolerance || std::abs(dx3) > protocol_tolerance;
  if (m1_moved && phase_moved) {
    throw ProtocolViolation("closed form needs dx1 = 0 or dx2 = dx3 = 0");
  }
  const double dx0 = source.delta_x0();
  if (phase_moved && !source.is_degenerate() && std::abs(dx0) > protocol_tolerance) {
    throw ProtocolViolation("closed form does not factorize for a nondegenerate source with dx0");
  }

  const double m1 = geometry_factor * dx1 - dx0;
  const double l2 = geometry_factor * dx2;
  const double l3 = geometry_factor * dx3;
  const double f = correlation_envelope(source.spectral(), (2.0 * m1 - l2 - l3) / speed_of_light);
  const double beat = std::cos(source.beat_angular_frequency() * m1 / speed_of_light);
  const double phase =
      std::cos(two_pi * (l2 / source.center_wavelength_u() - l3 / source.center_wavelength_l()));
  const double s = sign == FringeSign::Peak ? 1.0 : -1.0;
  return 0.5 * (1.0 + s * source.visibility() * f * beat * phase);
}

double polarization_correlation(const AnalyzerSettings& analyzers, double visibility) {
  return (1.0 + visibility * std::cos(2.0 * (analyzers.theta2 - analyzers.theta1))) /
         (1.0 + visibility);
}

std::optional<FringeSign> fringe_sign(const AnalyzerSettings& analyzers) {
  const bool diagonal1 = is_multiple(analyzers.theta1 - pi / 4, pi / 2);
  const bool diagonal2 = is_multiple(analyzers.theta2 - pi / 4, pi / 2);
  if (!diagonal1 || !diagonal2) return std::nullopt;
  return is_multiple(analyzers.theta2 - analyzers.theta1, pi) ? FringeSign::Peak : FringeSign::Dip;
}

InterferenceConditions check_interference_conditions(const DelaySet& delays,
                                                     const BiphotonSource& source) {
  InterferenceConditions report;
  report.path_mismatch =
      delays.long_path_l - delays.long_path_u - 2.0 * delays.source_path_offset;
  const double support = speed_of_light * source.spectral().correlation_width();
  report.condition_i = std::abs(report.path_mismatch) < support;
  report.condition_ii = true;
  report.note =
      "monochromatic pump: two-photon coherence length is unbounded, condition (ii) always holds";
  return report;
}

}  // namespace franson
