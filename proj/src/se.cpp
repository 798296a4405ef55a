#include "ampkit/se.hpp"

#include <cmath>

#include "ampkit/denoise.hpp"
#include "ampkit/mamp_pipeline.hpp"
#include "ampkit/rng.hpp"

namespace ampkit {

std::vector<double> SeTrace::mse_pred_db() const {
  std::vector<double> out(mse_pred.size());
  for (std::size_t i = 0; i < mse_pred.size(); ++i) out[i] = to_db(mse_pred[i]);
  return out;
}

std::vector<double> SeTrace::nmse_pred_db() const {
  std::vector<double> out(mse_pred.size());
  for (std::size_t i = 0; i < mse_pred.size(); ++i) {
    out[i] = to_db(mse_pred[i] / signal_power);
  }
  return out;
}

double SeTrace::final_nmse_db() const {
  return mse_pred.empty() ? 0.0 : to_db(mse_pred.back() / signal_power);
}

SeTrace amp_se(const PriorSpec& prior, double sigma_w2, double alpha, int iters,
               const QuadratureCfg& cfg) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("amp_se: prior has no signal law to average over");
  }
  SeTrace trace;
  trace.signal_power = prior.second_moment();
  double tau2 = sigma_w2 + trace.signal_power / alpha;
  for (int t = 1; t <= iters; ++t) {
    const double mse = prior_mmse(prior, tau2, cfg);
    trace.tau2.push_back(tau2);
    trace.mse_pred.push_back(mse);
    trace.v_hat.push_back(mse);  // AMP's output is the posterior mean itself
    tau2 = sigma_w2 + mse / alpha;
  }
  return trace;
}

SeTrace oamp_se(const PriorSpec& prior, double sigma_w2, const SpectralModel& spectral,
                int iters, const QuadratureCfg& cfg) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("oamp_se: prior has no signal law to average over");
  }
  SeTrace trace;
  trace.signal_power = prior.second_moment();
  double v_hat = trace.signal_power;
  for (int t = 1; t <= iters; ++t) {
    const double zeta = sigma_w2 / std::max(v_hat, kVarianceFloor);
    const double ratio = spectral.lmmse_trace_ratio(zeta);
    const double tau2 = std::max(v_hat * (1.0 / ratio - 1.0), kVarianceFloor);
    const double mse = prior_mmse(prior, tau2, cfg);
    trace.tau2.push_back(tau2);
    trace.mse_pred.push_back(mse);
    if (mse >= tau2) {
      trace.v_hat.push_back(mse);
      trace.degenerate = true;
      break;
    }
    v_hat = 1.0 / (1.0 / std::max(mse, kVarianceFloor) - 1.0 / tau2);
    trace.v_hat.push_back(v_hat);
  }
  return trace;
}

SeTrace mamp_se(const PriorSpec& prior, double sigma_w2, const SpectralModel& spectral,
                int iters, int mc_samples, std::uint64_t seed, double damping1,
                double damping2, const QuadratureCfg& cfg) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("mamp_se: prior has no signal law to average over");
  }
  if (spectral.depth() < 2 * iters) {
    throw std::invalid_argument("mamp_se: spectral model depth must be >= 2*iters");
  }
  if (mc_samples < 2) throw std::invalid_argument("mamp_se: mc_samples must be >= 2");

  const int s_count = mc_samples;
  const double inv_s = 1.0 / static_cast<double>(s_count);

  SeTrace trace;
  trace.signal_power = prior.second_moment();
  MampPipeline pipeline(spectral, sigma_w2);

  Eigen::MatrixXd v_cross = Eigen::MatrixXd::Zero(iters + 1, iters + 1);
  v_cross(0, 0) = prior.second_moment();
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(iters, iters);

  // Per-sample state: the signal, the standard-normal history feeding the
  // incremental Cholesky of Xi_t, and the output-error history q^(i).
  RandomStream rng(seed);
  const Eigen::VectorXd xs =
      sample_prior(prior, s_count, rng.substream("signal").seed());
  RandomStream noise = rng.substream("noise");
  Eigen::MatrixXd z_hist(s_count, iters);      // standard normals, column t-1
  Eigen::MatrixXd q_hist(s_count, iters + 1);  // q^(i) in column i-1
  q_hist.col(0) = -xs;

  // Lower-triangular Cholesky rows of Xi_t, grown one row per iteration so
  // already-drawn joint noise history stays valid.
  std::vector<std::vector<double>> chol;

  for (int t = 1; t <= iters; ++t) {
    const MampPipeline::Step step = pipeline.advance(v_cross);
    const double tau2 = step.tau2;
    if (!std::isfinite(tau2) || !std::isfinite(step.epsilon) || step.epsilon == 0.0) {
      trace.degenerate = true;
      break;
    }
    xi(t - 1, t - 1) = tau2;
    for (int j = 1; j < t; ++j) {
      const double c = pipeline.cross_tau2(t, j, v_cross);
      xi(t - 1, j - 1) = c;
      xi(j - 1, t - 1) = c;
    }

    // Extend the Cholesky factor with the new row.
    std::vector<double> row(t, 0.0);
    for (int j = 1; j < t; ++j) {
      double acc = xi(t - 1, j - 1);
      for (int k = 0; k + 1 < j; ++k) acc -= row[k] * chol[j - 1][k];
      row[j - 1] = acc / chol[j - 1][j - 1];
    }
    double pivot2 = tau2;
    for (int k = 0; k + 1 < t; ++k) pivot2 -= row[k] * row[k];
    if (pivot2 < -1e-8 * tau2) {
      trace.degenerate = true;  // Xi lost positive semidefiniteness
      break;
    }
    row[t - 1] = std::sqrt(std::max(pivot2, 1e-18 * tau2));
    chol.push_back(row);

    // Joint-Gaussian input r^(t) = x + n_t per sample.
    for (int s = 0; s < s_count; ++s) z_hist(s, t - 1) = noise.gaussian();
    Eigen::VectorXd n_t = Eigen::VectorXd::Zero(s_count);
    for (int k = 0; k < t; ++k) n_t += row[k] * z_hist.col(k);

    const double mse = prior_mmse(prior, tau2, cfg);
    trace.tau2.push_back(tau2);
    trace.mse_pred.push_back(mse);
    const double v_mmse = std::max(mse, kVarianceFloor);
    if (v_mmse >= tau2) {
      trace.v_hat.push_back(mse);
      trace.degenerate = true;
      break;
    }
    const double v_next = 1.0 / (1.0 / v_mmse - 1.0 / tau2);

    // NLE output error per sample, with the solver's beta1 damping.
    for (int s = 0; s < s_count; ++s) {
      const double r = xs(s) + n_t(s);
      const double post = scalar_posterior(prior, r, tau2).mean;
      const double x_raw = v_next * (post / v_mmse - r / tau2);
      q_hist(s, t) =
          damping1 * (x_raw - xs(s)) + (1.0 - damping1) * q_hist(s, t - 1);
    }

    // Monte-Carlo cross-variance row, then beta2 damping as in the solver.
    for (int j = 1; j <= t + 1; ++j) {
      v_cross(t, j - 1) = q_hist.col(t).dot(q_hist.col(j - 1)) * inv_s;
    }
    for (int i = t + 1; i >= 2; --i) {
      v_cross(t, i - 1) =
          damping2 * v_cross(t, i - 1) + (1.0 - damping2) * v_cross(t - 1, i - 2);
    }
    v_cross(t, t) = std::max(v_cross(t, t), kVarianceFloor);
    for (int j = 1; j <= t; ++j) v_cross(j - 1, t) = v_cross(t, j - 1);
    trace.v_hat.push_back(v_cross(t, t));
  }

  const int steps = trace.iterations();
  trace.xi = xi.topLeftCorner(steps, steps);
  trace.v_cross = v_cross.topLeftCorner(steps + 1, steps + 1);
  return trace;
}

}  // namespace ampkit
