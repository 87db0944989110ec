#pragma once

#include <optional>
#include <span>
#include <string>

#include "franson/optics.hpp"
#include "franson/spectral.hpp"

namespace franson {

/// Photon-pair source as seen at the Franson interferometer inputs.
class BiphotonSource {
 public:
  /// Throws std::invalid_argument unless 1/lambda_u + 1/lambda_l equals
  /// 1/lambda_p to 1e-9 relative and 0 <= visibility <= 1.
  BiphotonSource(double pump_wavelength, double center_wavelength_u, double center_wavelength_l,
                 SpectralModel<double> spectral, double delta_x0, double visibility);

  static BiphotonSource degenerate(double pump_wavelength, SpectralModel<double> spectral,
                                   double visibility, double delta_x0 = 0.0);

  /// Nondegenerate pair with lambda_u - lambda_l = wavelength_split.
  static BiphotonSource with_split(double pump_wavelength, double wavelength_split,
                                   SpectralModel<double> spectral, double visibility,
                                   double delta_x0 = 0.0);

  double pump_wavelength() const { return pump_wavelength_; }
  double center_wavelength_u() const { return lambda_u_; }
  double center_wavelength_l() const { return lambda_l_; }
  const SpectralModel<double>& spectral() const { return spectral_; }
  double delta_x0() const { return delta_x0_; }
  double visibility() const { return visibility_; }

  double omega_u() const;
  double omega_l() const;
  double wavenumber_u() const;
  double wavenumber_l() const;
  /// omega_u - omega_l (signed).
  double beat_angular_frequency() const { return omega_u() - omega_l(); }
  /// |omega_u - omega_l| / 2 pi.
  double beat_frequency() const;
  bool is_degenerate() const { return lambda_u_ == lambda_l_; }

  BiphotonSource with_delta_x0(double delta_x0) const;
  BiphotonSource with_visibility(double visibility) const;

 private:
  double pump_wavelength_;
  double lambda_u_;
  double lambda_l_;
  SpectralModel<double> spectral_;
  double delta_x0_;
  double visibility_;
};

/// Linear analyzer angles (radians from H) before the two detectors.
struct AnalyzerSettings {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

enum class EnvelopeMethod { ClosedForm, Quadrature };

struct EngineOptions {
  EnvelopeMethod envelope = EnvelopeMethod::ClosedForm;
  QuadratureOptions quadrature{};
};

/// Unnormalized pieces of the coincidence rate: the diagonal sum of path
/// weights, the visibility-free interference sum, and the diagonal weight
/// the same paths have behind +45/+45 analyzers (the plateau reference).
struct CoincidenceTerms {
  double diagonal = 0.0;
  double interference = 0.0;
  double plateau_weight = 0.0;
};

CoincidenceTerms coincidence_terms(std::span<const PathAmplitude<double>> paths,
                                   const BiphotonSource& source, const AnalyzerSettings& analyzers,
                                   const EngineOptions& options = {});

/// Coincidence probability from the detection alternatives, integrated
/// over the pair spectrum. Cross terms carry the source visibility and the
/// result is scaled so the incoherent plateau behind +-45 degree analyzers
/// is exactly 1/2. Throws NormalizationFailure if that plateau weight is
/// zero or the result leaves [0,1] by more than 1e-12.
double coincidence_probability(std::span<const PathAmplitude<double>> paths,
                               const BiphotonSource& source, const AnalyzerSettings& analyzers,
                               const EngineOptions& options = {});

enum class FringeSign { Peak = 1, Dip = -1 };

/// Closed-form law
///   P = 1/2 [1 +- V f cos(dw (dx1 - dx0)/c) cos(2 pi (dx2/lambda_u - dx3/lambda_l))]
/// with f = g((2 (dx1 - dx0) - dx2 - dx3) / c). Stage displacements are
/// multiplied by `geometry_factor` before use. Valid only when a single
/// stage group is displaced; throws ProtocolViolation otherwise.
double analytic_probability(double dx1, double dx2, double dx3, const BiphotonSource& source,
                            FringeSign sign, double geometry_factor = 1.0);

/// (1 + V cos 2(theta2 - theta1)) / (1 + V).
double polarization_correlation(const AnalyzerSettings& analyzers, double visibility);

/// Peak for equal +-45 degree analyzers, Dip for crossed ones, nothing for
/// any other setting.
std::optional<FringeSign> fringe_sign(const AnalyzerSettings& analyzers);

/// Long-arm optical paths of both local interferometers plus the source
/// path offset dx0 that sets the per-term delays.
struct DelaySet {
  double long_path_u = 0.0;
  double long_path_l = 0.0;
  double source_path_offset = 0.0;
};

struct InterferenceConditions {
  /// Long-arm mismatch, corrected for dx0, is inside the envelope support.
  bool condition_i = false;
  /// Two-photon coherence; always true for a monochromatic pump.
  bool condition_ii = true;
  /// long_path_l - long_path_u - 2 dx0 [m].
  double path_mismatch = 0.0;
  std::string note;
};

InterferenceConditions check_interference_conditions(const DelaySet& delays,
                                                     const BiphotonSource& source);

}  // namespace franson
