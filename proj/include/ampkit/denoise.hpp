#pragma once

#include <Eigen/Dense>

#include "ampkit/model.hpp"

namespace ampkit {

// Floor applied to channel and posterior variances so harmonic combinations
// stay finite near perfect recovery.
inline constexpr double kVarianceFloor = 1e-12;

// Output of a component-wise denoiser: per-component posterior means (or
// thresholded values), the average posterior variance, and the average
// derivative <eta'> with respect to the input.
struct DenoiserResult {
  Eigen::VectorXd mean;
  double avg_var = 0.0;
  double avg_deriv = 0.0;
};

struct ScalarPosterior {
  double mean;
  double var;
  double deriv;  // d mean / d r
};

// Scalar MMSE kernels for the channel r = x + sqrt(tau2) z. The derivative is
// evaluated symbolically (not via the var/tau2 identity, so the identity
// stays checkable).
ScalarPosterior bg_posterior(double r, double tau2, double rho, double mu);
ScalarPosterior discrete_posterior(double r, double tau2,
                                   const std::vector<double>& levels,
                                   const std::vector<double>& probs);
ScalarPosterior scalar_posterior(const PriorSpec& prior, double r, double tau2);

// sign(r) * max(|r| - gamma, 0). avg_deriv is the active fraction; the
// derivative at |r| = gamma counts as 0. avg_var is not defined for a plain
// thresholder and is reported as 0 (the LASSO solvers track their own
// variance surrogate).
DenoiserResult soft_threshold(const Eigen::VectorXd& r, double gamma);

// Posterior mean/variance under rho*N(mu, 1/rho) + (1-rho)*delta0.
DenoiserResult bg_mmse(const Eigen::VectorXd& r, double tau2, double rho, double mu);

// Posterior mean/variance under a finite discrete prior, computed with
// max-subtracted exponentials.
DenoiserResult discrete_mmse(const Eigen::VectorXd& r, double tau2, const PriorSpec& prior);

// Dispatch on prior kind (BernoulliGaussian/Discrete).
DenoiserResult mmse_denoise(const PriorSpec& prior, const Eigen::VectorXd& r, double tau2);

// Divergence-free wrapper around an MMSE denoiser output:
//   v_hat * (mean / v_mmse - r / tau2)  with  v_hat = (1/v_mmse - 1/tau2)^-1.
// Its empirical divergence is 0 by construction. Throws
// DegenerateDenoiserError when tau2 <= inner.avg_var (singular combination).
Eigen::VectorXd divergence_free(const DenoiserResult& inner, const Eigen::VectorXd& r,
                                double tau2);

}  // namespace ampkit
