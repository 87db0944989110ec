#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "franson/errors.hpp"

namespace franson {

struct LeastSquaresOptions {
  int max_iterations = 500;
  double initial_damping = 1e-3;
  /// Relative cost decrease or step size below which the fit has converged.
  double tolerance = 1e-15;
  /// Scale the covariance by the reduced chi-square (unknown noise level).
  bool scale_covariance = false;
};

struct LeastSquaresResult {
  Eigen::VectorXd parameters;
  Eigen::MatrixXd covariance;
  double cost = 0.0;  // 1/2 |r|^2
  double initial_cost = 0.0;
  int iterations = 0;
};

namespace detail {

template <typename Residual>
Eigen::MatrixXd numeric_jacobian(Residual& residual, const Eigen::VectorXd& p,
                                 Eigen::Index observations) {
  Eigen::MatrixXd jac(observations, p.size());
  Eigen::VectorXd probe = p;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(p(j)));
    probe(j) = p(j) + h;
    const Eigen::VectorXd up = residual(probe);
    probe(j) = p(j) - h;
    const Eigen::VectorXd down = residual(probe);
    probe(j) = p(j);
    jac.col(j) = (up - down) / (2.0 * h);
  }
  return jac;
}

}  // namespace detail

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal
/// scaling) on central-difference Jacobians. `residual` maps parameters to
/// the vector of weighted residuals. Throws FitDiverged on non-finite
/// residuals or when the iteration budget runs out while the cost is still
/// moving.
template <typename Residual>
LeastSquaresResult levenberg_marquardt(Residual residual, Eigen::VectorXd params,
                                       const LeastSquaresOptions& options = {}) {
  Eigen::VectorXd r = residual(params);
  if (!r.allFinite()) throw FitDiverged("non-finite residuals at the initial guess");
  const Eigen::Index n = r.size();
  const Eigen::Index m = params.size();
  if (n < m) throw InsufficientData("fewer observations than parameters");

  LeastSquaresResult out;
  double cost = 0.5 * r.squaredNorm();
  out.initial_cost = cost;
  double damping = options.initial_damping;
  bool converged = false;
  int iteration = 0;

  Eigen::MatrixXd jac = detail::numeric_jacobian(residual, params, n);
  for (; iteration < options.max_iterations && !converged; ++iteration) {
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    if (gradient.norm() <= 1e-300) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = normal;
      for (Eigen::Index j = 0; j < m; ++j) {
        damped(j, j) += damping * std::max(normal(j, j), 1e-12);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
      const Eigen::VectorXd trial = params + step;
      const Eigen::VectorXd trial_r = residual(trial);
      const double trial_cost = trial_r.allFinite() ? 0.5 * trial_r.squaredNorm()
                                                    : std::numeric_limits<double>::infinity();
      if (step.allFinite() && trial_cost < cost) {
        const double decrease = cost - trial_cost;
        const bool small_step =
            step.norm() <= options.tolerance * (params.norm() + options.tolerance);
        params = trial;
        r = trial_r;
        converged = decrease <= options.tolerance * cost || small_step;
        cost = trial_cost;
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        jac = detail::numeric_jacobian(residual, params, n);
      } else {
        damping *= 10.0;
        if (damping > 1e16) {
          // No descent direction left: a local minimum to working precision.
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) {
    throw FitDiverged("residual norm still changing after " +
                      std::to_string(options.max_iterations) + " iterations");
  }

  out.parameters = params;
  out.cost = cost;
  out.iterations = iteration;
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  out.covariance = normal.completeOrthogonalDecomposition().pseudoInverse();
  if (options.scale_covariance) {
    const double dof = static_cast<double>(std::max<Eigen::Index>(n - m, 1));
    out.covariance *= 2.0 * cost / dof;
  }
  return out;
}

}  // namespace franson
