#include "franson/counts.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "franson/least_squares.hpp"

namespace franson {

void CountingConfig::validate() const {
  if (!(plateau_rate > 0.0)) throw std::invalid_argument("plateau_rate must be positive");
  if (!(bin_duration > 0.0)) throw std::invalid_argument("bin_duration must be positive");
  if (!(accidental_rate >= 0.0)) throw std::invalid_argument("accidental_rate must be >= 0");
}

std::vector<CountRecord> exact_records(const ScanResult& scan, const CountingConfig& cfg) {
  std::vector<CountRecord> out(scan.positions.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].position = scan.positions[i];
    out[i].probability = scan.probabilities[i];
    out[i].expected_rate = 2.0 * cfg.plateau_rate * scan.probabilities[i] + cfg.accidental_rate;
  }
  return out;
}

std::vector<CountRecord> sample_counts(const ScanResult& scan, const CountingConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  auto out = exact_records(scan, cfg);
  for (auto& record : out) {
    const double mean = record.expected_rate * cfg.bin_duration;
    std::uint64_t n = 0;
    if (mean > 0.0) n = std::poisson_distribution<std::uint64_t>(mean)(rng);
    record.counts = n;
    record.uncertainty = std::sqrt(static_cast<double>(n));
  }
  return out;
}

namespace {

constexpr std::size_t min_records = 10;

// Positions mapped to u in [-1, 1]; weights 1/sigma for Poisson data.
struct Series {
  Eigen::VectorXd u;
  Eigen::VectorXd y;
  Eigen::VectorXd inv_sigma;
  double x_center = 0.0;
  double x_scale = 1.0;
  bool poisson = false;

  Eigen::Index size() const { return u.size(); }
  double to_x(double value) const { return x_center + x_scale * value; }
};

Series make_series(std::span<const CountRecord> records, const EstimatorOptions& options,
                   bool normalize_positions = true) {
  if (records.size() < min_records) {
    throw InsufficientData("need at least " + std::to_string(min_records) + " records");
  }
  const auto with_counts = std::count_if(records.begin(), records.end(),
                                         [](const CountRecord& r) { return r.counts.has_value(); });
  if (with_counts != 0 && static_cast<std::size_t>(with_counts) != records.size()) {
    throw InsufficientData("records mix sampled counts and bare probabilities");
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].position < records[b].position;
  });

  Series s;
  s.poisson = with_counts != 0;
  const double lo = records[order.front()].position;
  const double hi = records[order.back()].position;
  if (!(hi > lo)) throw InsufficientData("records span no range of positions");
  if (normalize_positions) {
    s.x_center = 0.5 * (lo + hi);
    s.x_scale = 0.5 * (hi - lo);
  }

  const auto n = static_cast<Eigen::Index>(records.size());
  s.u.resize(n);
  s.y.resize(n);
  s.inv_sigma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CountRecord& r = records[order[static_cast<std::size_t>(i)]];
    s.u(i) = (r.position - s.x_center) / s.x_scale;
    if (s.poisson) {
      const double c = static_cast<double>(*r.counts);
      s.y(i) = c - options.accidental_counts;
      s.inv_sigma(i) = 1.0 / std::sqrt(std::max(c, 1.0));
    } else {
      if (!std::isfinite(r.probability)) {
        throw InsufficientData("record has neither counts nor a probability");
      }
      s.y(i) = r.probability;
      s.inv_sigma(i) = 1.0;
    }
  }
  return s;
}

double triangle(double z) { return std::max(0.0, 1.0 - std::abs(z)); }

double sigma_of(const Eigen::MatrixXd& cov, Eigen::Index i) {
  return std::sqrt(std::max(cov(i, i), 0.0));
}

LeastSquaresOptions fit_options(const Series& s) {
  LeastSquaresOptions o;
  o.scale_covariance = !s.poisson;
  return o;
}

// Weighted linear least squares; returns coefficients and covariance
// (scaled by the residual variance for unweighted data).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> linear_fit(const Eigen::MatrixXd& design,
                                                       const Series& s) {
  const Eigen::MatrixXd a = s.inv_sigma.asDiagonal() * design;
  const Eigen::VectorXd b = s.inv_sigma.cwiseProduct(s.y);
  const Eigen::MatrixXd normal = a.transpose() * a;
  const auto solver = normal.ldlt();
  const Eigen::VectorXd coeff = solver.solve(a.transpose() * b);
  Eigen::MatrixXd cov = normal.completeOrthogonalDecomposition().pseudoInverse();
  if (!s.poisson) {
    const double dof = static_cast<double>(std::max<Eigen::Index>(s.size() - design.cols(), 1));
    cov *= (a * coeff - b).squaredNorm() / dof;
  }
  return {coeff, cov};
}

struct Peak {
  double wavenumber;  // rad per unit u
  std::complex<double> amplitude;
};

// Dominant nonzero spatial frequency of `r` on a uniform grid, located on a
// 4x zero-padded FFT with parabolic refinement. Frequencies below one cycle
// across the window are excluded.
Peak dominant_frequency(const Series& s, const Eigen::VectorXd& r) {
  const Eigen::Index n = s.size();
  const double du = (s.u(n - 1) - s.u(0)) / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(s.u(i) - (s.u(0) + du * static_cast<double>(i))) > 1e-6 * du) {
      throw InsufficientData("frequency initialization needs uniformly spaced positions");
    }
  }
  std::size_t padded = 1;
  while (padded < static_cast<std::size_t>(n)) padded *= 2;
  padded *= 4;

  std::vector<double> buffer(padded, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) buffer[static_cast<std::size_t>(i)] = r(i);
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, buffer);

  const std::size_t first =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(double(padded) / double(n))));
  std::size_t best = first;
  for (std::size_t k = first; k < padded / 2; ++k) {
    if (std::abs(spectrum[k]) > std::abs(spectrum[best])) best = k;
  }
  double offset = 0.0;
  if (best > first && best + 1 < padded / 2) {
    const double a = std::abs(spectrum[best - 1]);
    const double b = std::abs(spectrum[best]);
    const double c = std::abs(spectrum[best + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  const double k = static_cast<double>(best) + offset;
  return {two_pi * k / (static_cast<double>(padded) * du), spectrum[best]};
}

std::vector<double> candidate_centers(const Series& s, std::size_t count) {
  std::vector<double> centers;
  const auto n = static_cast<std::size_t>(s.size());
  const std::size_t stride = std::max<std::size_t>(1, n / count);
  for (std::size_t i = 0; i < n; i += stride) centers.push_back(s.u(static_cast<Eigen::Index>(i)));
  return centers;
}

std::vector<double> candidate_widths(const Series& s, std::size_t count) {
  const double du = 2.0 / static_cast<double>(s.size() - 1);
  const double lo = std::log(2.0 * du), hi = std::log(2.0);
  std::vector<double> widths(count);
  for (std::size_t i = 0; i < count; ++i) {
    widths[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return widths;
}

}  // namespace

TriangleFit fit_triangle(std::span<const CountRecord> records, const EstimatorOptions& options) {
  const Series s = make_series(records, options);
  const Eigen::VectorXd w = s.inv_sigma.cwiseAbs2();

  // Coarse search over apex and width; plateau and amplitude are linear.
  double best_chi2 = std::numeric_limits<double>::infinity();
  Eigen::Vector4d start(s.y.mean(), 0.0, 0.0, 0.5);
  const double syy = (w.array() * s.y.array().square()).sum();
  for (double u0 : candidate_centers(s, 200)) {
    for (double width : candidate_widths(s, 24)) {
      double s00 = 0, s01 = 0, s11 = 0, t0 = 0, t1 = 0;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double b = triangle((s.u(i) - u0) / width);
        s00 += w(i);
        s01 += w(i) * b;
        s11 += w(i) * b * b;
        t0 += w(i) * s.y(i);
        t1 += w(i) * b * s.y(i);
      }
      const double det = s00 * s11 - s01 * s01;
      if (!(det > 1e-12 * s00 * s11)) continue;
      const double p = (s11 * t0 - s01 * t1) / det;
      const double a = (s00 * t1 - s01 * t0) / det;
      const double chi2 = syy - p * t0 - a * t1;
      if (chi2 < best_chi2) {
        best_chi2 = chi2;
        start << p, a, u0, width;
      }
    }
  }

  auto residual = [&s](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(s.size());
    const double width = std::abs(q(3));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double model = q(0) + q(1) * triangle((s.u(i) - q(2)) / width);
      r(i) = (model - s.y(i)) * s.inv_sigma(i);
    }
    return r;
  };
  const auto result = levenberg_marquardt(residual, Eigen::VectorXd(start), fit_options(s));
  const Eigen::VectorXd& q = result.parameters;
  const Eigen::MatrixXd& cov = result.covariance;

  TriangleFit fit;
  fit.plateau = q(0);
  fit.sigma_plateau = sigma_of(cov, 0);
  fit.amplitude = q(1);
  fit.sigma_amplitude = sigma_of(cov, 1);
  fit.center = s.to_x(q(2));
  fit.sigma_center = s.x_scale * sigma_of(cov, 2);
  fit.half_width = s.x_scale * std::abs(q(3));
  fit.sigma_half_width = s.x_scale * sigma_of(cov, 3);
  if (!(fit.plateau > 0.0)) throw FitDiverged("triangle fit produced a non-positive plateau");
  fit.visibility = std::abs(fit.amplitude) / fit.plateau;
  Eigen::Vector2d grad(-fit.visibility / fit.plateau,
                       (fit.amplitude < 0 ? -1.0 : 1.0) / fit.plateau);
  fit.sigma_visibility = std::sqrt(std::max(0.0, grad.dot(cov.topLeftCorner<2, 2>() * grad)));
  return fit;
}

FringeFit fit_fringe(std::span<const CountRecord> records, const EstimatorOptions& options) {
  const Series s = make_series(records, options);
  const double mean = s.y.mean();
  if (!(mean > 0.0)) throw InsufficientData("fringe data has no signal");
  const Peak peak = dominant_frequency(s, s.y / mean - Eigen::VectorXd::Ones(s.size()));

  Eigen::MatrixXd design(s.size(), 3);
  design.col(0).setOnes();
  design.col(1) = (peak.wavenumber * s.u).array().cos();
  design.col(2) = (peak.wavenumber * s.u).array().sin();
  const auto [coeff, unused] = linear_fit(design, s);
  Eigen::Vector4d start(coeff(0), std::hypot(coeff(1), coeff(2)) / coeff(0), peak.wavenumber,
                        std::atan2(-coeff(2), coeff(1)));

  auto residual = [&s](const Eigen::VectorXd& q) {
    return ((q(0) * (1.0 + q(1) * (q(2) * s.u.array() + q(3)).cos())).matrix() - s.y)
        .cwiseProduct(s.inv_sigma)
        .eval();
  };
  const auto result = levenberg_marquardt(residual, Eigen::VectorXd(start), fit_options(s));
  const Eigen::VectorXd& q = result.parameters;

  FringeFit fit;
  fit.plateau = q(0);
  fit.visibility = std::abs(q(1));
  fit.sigma_visibility = sigma_of(result.covariance, 1);
  const double k = std::abs(q(2));
  fit.period = two_pi * s.x_scale / k;
  fit.sigma_period = two_pi * s.x_scale * sigma_of(result.covariance, 2) / (k * k);
  fit.phase = q(3);
  return fit;
}

PolarizationFit fit_polarization_curve(std::span<const CountRecord> records,
                                       const EstimatorOptions& options) {
  const Series s = make_series(records, options, false);
  Eigen::MatrixXd design(s.size(), 3);
  design.col(0).setOnes();
  design.col(1) = (2.0 * s.u).array().cos();
  design.col(2) = (2.0 * s.u).array().sin();
  const auto [coeff, cov] = linear_fit(design, s);

  const double a = coeff(0);
  const double radius = std::hypot(coeff(1), coeff(2));
  if (!(a > 0.0)) throw FitDiverged("polarization fit produced a non-positive mean");
  PolarizationFit fit;
  fit.amplitude = a;
  fit.visibility = radius / a;
  fit.theta0 = 0.5 * std::atan2(coeff(2), coeff(1));
  Eigen::Vector3d grad(-fit.visibility / a, 0.0, 0.0);
  if (radius > 0.0) {
    grad(1) = coeff(1) / (a * radius);
    grad(2) = coeff(2) / (a * radius);
  }
  fit.sigma_visibility = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  return fit;
}

EnvelopedFringeFit fit_enveloped_fringe(std::span<const CountRecord> records,
                                        const EstimatorOptions& options) {
  const Series s = make_series(records, options);
  const double mean = s.y.mean();
  if (!(mean > 0.0)) throw InsufficientData("fringe data has no signal");
  const Peak peak = dominant_frequency(s, s.y / mean - Eigen::VectorXd::Ones(s.size()));
  const double k0 = peak.wavenumber;

  // cos(k(u - u0) + phi) spans the same space as {cos ku, sin ku}, so for a
  // fixed envelope the model is linear in (p, p m cos, p m sin).
  const Eigen::ArrayXd cosine = (k0 * s.u).array().cos();
  const Eigen::ArrayXd sine = (k0 * s.u).array().sin();
  const Eigen::ArrayXd w = s.inv_sigma.array().square();
  double best_chi2 = std::numeric_limits<double>::infinity();
  Eigen::VectorXd start(6);
  start << mean, 0.0, 0.0, 0.5, k0, 0.0;
  for (double u0 : candidate_centers(s, 64)) {
    for (double width : candidate_widths(s, 16)) {
      Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
      Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
      double syy = 0.0;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double b = triangle((s.u(i) - u0) / width);
        const Eigen::Vector3d basis(1.0, b * cosine(i), b * sine(i));
        normal.noalias() += w(i) * basis * basis.transpose();
        rhs += w(i) * s.y(i) * basis;
        syy += w(i) * s.y(i) * s.y(i);
      }
      const auto ldlt = normal.ldlt();
      if (ldlt.info() != Eigen::Success || !(normal(1, 1) > 0.0)) continue;
      const Eigen::Vector3d c = ldlt.solve(rhs);
      const double chi2 = syy - c.dot(rhs);
      if (c(0) > 0.0 && chi2 < best_chi2) {
        best_chi2 = chi2;
        const double psi = std::atan2(-c(2), c(1));
        start << c(0), std::hypot(c(1), c(2)) / c(0), u0, width, k0, psi + k0 * u0;
      }
    }
  }

  auto residual = [&s](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(s.size());
    const double width = std::abs(q(3));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double d = s.u(i) - q(2);
      const double model = q(0) * (1.0 + q(1) * triangle(d / width) * std::cos(q(4) * d + q(5)));
      r(i) = (model - s.y(i)) * s.inv_sigma(i);
    }
    return r;
  };
  const auto result = levenberg_marquardt(residual, start, fit_options(s));
  Eigen::VectorXd q = result.parameters;
  if (q(1) < 0.0) {
    q(1) = -q(1);
    q(5) += pi;
  }
  if (q(4) < 0.0) {
    q(4) = -q(4);
    q(5) = -q(5);
  }
  const Eigen::MatrixXd& cov = result.covariance;

  EnvelopedFringeFit fit;
  fit.plateau = q(0);
  fit.modulation = q(1);
  fit.sigma_modulation = sigma_of(cov, 1);
  fit.center = s.to_x(q(2));
  fit.sigma_center = s.x_scale * sigma_of(cov, 2);
  fit.half_width = s.x_scale * std::abs(q(3));
  fit.sigma_half_width = s.x_scale * sigma_of(cov, 3);
  fit.wavenumber = q(4) / s.x_scale;
  fit.sigma_wavenumber = sigma_of(cov, 4) / s.x_scale;
  fit.phase = std::remainder(q(5), two_pi);
  return fit;
}

VisibilityEstimate estimate_visibility(std::span<const CountRecord> records, VisibilityModel model,
                                       const EstimatorOptions& options) {
  switch (model) {
    case VisibilityModel::TrianglePeakDip: {
      const auto fit = fit_triangle(records, options);
      return {fit.visibility, fit.sigma_visibility};
    }
    case VisibilityModel::Sinusoid: {
      const auto fit = fit_fringe(records, options);
      return {fit.visibility, fit.sigma_visibility};
    }
    case VisibilityModel::PolarizationCurve: {
      const auto fit = fit_polarization_curve(records, options);
      return {fit.visibility, fit.sigma_visibility};
    }
  }
  throw std::invalid_argument("unknown visibility model");
}

BeatEstimate estimate_beat_frequency(std::span<const CountRecord> records, double center_wavelength,
                                     const EstimatorOptions& options) {
  const auto fit = fit_enveloped_fringe(records, options);
  if (fit.modulation < 3.0 * fit.sigma_modulation) {
    throw NoBeatDetected("modulation is below three standard errors");
  }
  // The cosine must change sign inside the envelope for a beat to exist.
  if (fit.wavenumber * fit.half_width < pi || fit.wavenumber < 3.0 * fit.sigma_wavenumber) {
    throw NoBeatDetected("no beat oscillation resolved inside the envelope");
  }
  BeatEstimate beat;
  beat.delta_f = speed_of_light * fit.wavenumber / two_pi;
  beat.sigma_delta_f = speed_of_light * fit.sigma_wavenumber / two_pi;
  const double scale = center_wavelength * center_wavelength / speed_of_light;
  beat.delta_lambda = scale * beat.delta_f;
  beat.sigma_delta_lambda = scale * beat.sigma_delta_f;
  return beat;
}

EnvelopeCenter fit_envelope_center(std::span<const CountRecord> records,
                                   const EstimatorOptions& options) {
  const auto fit = fit_triangle(records, options);
  double lo = records.front().position, hi = lo;
  for (const auto& r : records) {
    lo = std::min(lo, r.position);
    hi = std::max(hi, r.position);
  }
  if (!(std::abs(fit.amplitude) > min_feature_significance * fit.sigma_amplitude)) {
    throw FeatureOutOfWindow("no significant envelope in the scan window");
  }
  if (fit.center <= lo || fit.center >= hi) {
    throw FeatureOutOfWindow("envelope apex lies outside the scan window");
  }
  return {fit.center, fit.half_width, fit.sigma_center};
}

}  // namespace franson
