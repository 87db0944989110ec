#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "franson/scenarios.hpp"

namespace franson {

struct CountingConfig {
  /// Coincidence rate at P = 1/2 [Hz].
  double plateau_rate = 2000.0;
  double bin_duration = 1.0;
  double accidental_rate = 0.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct CountRecord {
  /// Stage position [m] or analyzer angle [rad].
  double position = 0.0;
  double probability = 0.0;
  double expected_rate = 0.0;
  std::optional<std::uint64_t> counts;
  /// sqrt(counts); zero for noiseless records.
  double uncertainty = 0.0;
};

/// Records carrying only the exact probabilities.
std::vector<CountRecord> exact_records(const ScanResult& scan, const CountingConfig& cfg = {});

/// Poisson counts with mean (2 R P + A) T per bin from a seeded
/// mt19937_64 stream; the same seed gives the same dataset.
std::vector<CountRecord> sample_counts(const ScanResult& scan, const CountingConfig& cfg);

struct EstimatorOptions {
  /// Accidental counts per bin subtracted before fitting.
  double accidental_counts = 0.0;
};

enum class VisibilityModel { TrianglePeakDip, Sinusoid, PolarizationCurve };

struct VisibilityEstimate {
  double visibility = 0.0;
  double sigma = 0.0;
};

/// plateau + amplitude * max(0, 1 - |x - center| / half_width)
struct TriangleFit {
  double plateau = 0.0, sigma_plateau = 0.0;
  double amplitude = 0.0, sigma_amplitude = 0.0;
  double center = 0.0, sigma_center = 0.0;
  double half_width = 0.0, sigma_half_width = 0.0;
  /// |amplitude| / plateau
  double visibility = 0.0, sigma_visibility = 0.0;
};

/// plateau * (1 + visibility * cos(2 pi x / period + phase))
struct FringeFit {
  double plateau = 0.0;
  double visibility = 0.0, sigma_visibility = 0.0;
  double period = 0.0, sigma_period = 0.0;
  double phase = 0.0;
};

/// a + b cos 2 theta + c sin 2 theta = a (1 + V cos 2 (theta - theta0))
struct PolarizationFit {
  double amplitude = 0.0;
  double visibility = 0.0, sigma_visibility = 0.0;
  double theta0 = 0.0;
};

/// plateau * (1 + modulation * tri((x - center)/half_width) * cos(k (x - center) + phase))
struct EnvelopedFringeFit {
  double plateau = 0.0;
  double modulation = 0.0, sigma_modulation = 0.0;
  double center = 0.0, sigma_center = 0.0;
  double half_width = 0.0, sigma_half_width = 0.0;
  double wavenumber = 0.0, sigma_wavenumber = 0.0;
  double phase = 0.0;
};

struct BeatEstimate {
  double delta_f = 0.0, sigma_delta_f = 0.0;
  double delta_lambda = 0.0, sigma_delta_lambda = 0.0;
};

struct EnvelopeCenter {
  double center = 0.0;
  /// Base half-width of the triangle, which is also its FWHM.
  double width = 0.0;
  double sigma = 0.0;
};

/// Amplitude, in standard errors, below which a fitted triangle is treated
/// as noise. The apex and width are searched over the whole window, so the
/// bar sits above the usual 2-3 sigma.
inline constexpr double min_feature_significance = 5.0;

TriangleFit fit_triangle(std::span<const CountRecord> records, const EstimatorOptions& options = {});
FringeFit fit_fringe(std::span<const CountRecord> records, const EstimatorOptions& options = {});
PolarizationFit fit_polarization_curve(std::span<const CountRecord> records,
                                       const EstimatorOptions& options = {});
EnvelopedFringeFit fit_enveloped_fringe(std::span<const CountRecord> records,
                                        const EstimatorOptions& options = {});

VisibilityEstimate estimate_visibility(std::span<const CountRecord> records, VisibilityModel model,
                                       const EstimatorOptions& options = {});

/// Beat frequency from an envelope x cosine fit of an M1 scan, with
/// delta_f = c / (spatial period). Throws NoBeatDetected when the cosine
/// factor is not resolved inside the envelope.
BeatEstimate estimate_beat_frequency(std::span<const CountRecord> records, double center_wavelength,
                                     const EstimatorOptions& options = {});

/// Triangle apex and half-width. Throws FeatureOutOfWindow when no
/// significant triangle sits inside the scanned range.
EnvelopeCenter fit_envelope_center(std::span<const CountRecord> records,
                                   const EstimatorOptions& options = {});

}  // namespace franson
