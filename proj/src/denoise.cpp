#include "ampkit/denoise.hpp"

#include <cmath>

namespace ampkit {

ScalarPosterior bg_posterior(double r, double tau2, double rho, double mu) {
  if (!(tau2 > 0.0)) throw std::invalid_argument("bg_posterior: tau2 must be > 0");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("bg_posterior: rho in (0, 1]");
  const double vx = 1.0 / rho;
  // Slab posterior from Gaussian-Gaussian conjugacy.
  const double v1 = 1.0 / (1.0 / vx + 1.0 / tau2);
  const double m1 = v1 * (mu / vx + r / tau2);

  double pi1 = 1.0;       // P(nonzero | r)
  double dlogit_dr = 0.0;
  if (rho < 1.0) {
    // log-odds slab vs spike; evaluated in log space to avoid under/overflow.
    const double s2 = vx + tau2;
    const double logit = std::log(rho / (1.0 - rho)) +
                         0.5 * std::log(tau2 / s2) +
                         0.5 * r * r / tau2 - 0.5 * (r - mu) * (r - mu) / s2;
    pi1 = 1.0 / (1.0 + std::exp(-logit));
    dlogit_dr = r / tau2 - (r - mu) / s2;
  }

  ScalarPosterior out;
  out.mean = pi1 * m1;
  out.var = pi1 * v1 + pi1 * (1.0 - pi1) * m1 * m1;
  out.deriv = pi1 * (1.0 - pi1) * m1 * dlogit_dr + pi1 * v1 / tau2;
  return out;
}

ScalarPosterior discrete_posterior(double r, double tau2,
                                   const std::vector<double>& levels,
                                   const std::vector<double>& probs) {
  if (!(tau2 > 0.0)) throw std::invalid_argument("discrete_posterior: tau2 must be > 0");
  const std::size_t K = levels.size();
  // Max-subtracted log weights.
  double max_a = -std::numeric_limits<double>::infinity();
  std::vector<double> a(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double d = r - levels[k];
    a[k] = (probs[k] > 0.0 ? std::log(probs[k]) : -745.0) - d * d / (2.0 * tau2);
    max_a = std::max(max_a, a[k]);
  }
  double z = 0.0, m = 0.0, m2 = 0.0;
  std::vector<double> w(K);
  for (std::size_t k = 0; k < K; ++k) {
    w[k] = std::exp(a[k] - max_a);
    z += w[k];
    m += w[k] * levels[k];
    m2 += w[k] * levels[k] * levels[k];
  }
  m /= z;
  m2 /= z;

  // d pi_k / dr = pi_k (l_k - mean) / tau2, so the mean derivative is the
  // softmax-weighted spread around the mean.
  double deriv = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    deriv += (w[k] / z) * levels[k] * (levels[k] - m);
  }

  ScalarPosterior out;
  out.mean = m;
  out.var = std::max(m2 - m * m, 0.0);
  out.deriv = deriv / tau2;
  return out;
}

ScalarPosterior scalar_posterior(const PriorSpec& prior, double r, double tau2) {
  switch (prior.kind) {
    case PriorKind::BernoulliGaussian:
      return bg_posterior(r, tau2, prior.rho, prior.mu);
    case PriorKind::Discrete:
      return discrete_posterior(r, tau2, prior.levels, prior.probs);
    case PriorKind::LaplaceLasso:
      throw UnsupportedPriorError("scalar_posterior: no MMSE denoiser for LaplaceLasso");
  }
  throw std::invalid_argument("scalar_posterior: unknown prior kind");
}

DenoiserResult soft_threshold(const Eigen::VectorXd& r, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("soft_threshold: gamma must be >= 0");
  DenoiserResult out;
  out.mean.resize(r.size());
  Eigen::Index active = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double mag = std::abs(r(i)) - gamma;
    if (mag > 0.0) {
      out.mean(i) = (r(i) > 0.0 ? mag : -mag);
      ++active;
    } else {
      out.mean(i) = 0.0;
    }
  }
  out.avg_deriv = static_cast<double>(active) / static_cast<double>(r.size());
  out.avg_var = 0.0;
  return out;
}

namespace {

DenoiserResult accumulate_posterior(const PriorSpec& prior, const Eigen::VectorXd& r,
                                    double tau2) {
  DenoiserResult out;
  out.mean.resize(r.size());
  double var_sum = 0.0, deriv_sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const ScalarPosterior p = scalar_posterior(prior, r(i), tau2);
    out.mean(i) = p.mean;
    var_sum += p.var;
    deriv_sum += p.deriv;
  }
  out.avg_var = var_sum / static_cast<double>(r.size());
  out.avg_deriv = deriv_sum / static_cast<double>(r.size());
  return out;
}

}  // namespace

DenoiserResult bg_mmse(const Eigen::VectorXd& r, double tau2, double rho, double mu) {
  return accumulate_posterior(PriorSpec::bernoulli_gaussian(mu, rho), r, tau2);
}

DenoiserResult discrete_mmse(const Eigen::VectorXd& r, double tau2, const PriorSpec& prior) {
  if (prior.kind != PriorKind::Discrete) {
    throw UnsupportedPriorError("discrete_mmse: prior must be Discrete");
  }
  return accumulate_posterior(prior, r, tau2);
}

DenoiserResult mmse_denoise(const PriorSpec& prior, const Eigen::VectorXd& r, double tau2) {
  return accumulate_posterior(prior, r, tau2);
}

Eigen::VectorXd divergence_free(const DenoiserResult& inner, const Eigen::VectorXd& r,
                                double tau2) {
  const double v_mmse = std::max(inner.avg_var, kVarianceFloor);
  if (!(tau2 > v_mmse)) {
    throw DegenerateDenoiserError("divergence_free: tau2 <= avg posterior variance");
  }
  const double v_hat = 1.0 / (1.0 / v_mmse - 1.0 / tau2);
  return v_hat * (inner.mean / v_mmse - r / tau2);
}

}  // namespace ampkit
