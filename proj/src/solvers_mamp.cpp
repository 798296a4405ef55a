#include <cmath>

#include "ampkit/mamp_pipeline.hpp"
#include "ampkit/solvers.hpp"
#include "trace_util.hpp"

namespace ampkit {

// Memory AMP: the LE replaces OAMP's matrix inversion with the matrix-
// polynomial recursion z^(t) = theta_t B z^(t-1) + xi_t (y - H x_hat^(t)),
// B = lambda_dagger I - HH^T, and combines all preceding estimates so the
// input error stays orthogonal to the signal and to every past output error.
// The NLE is OAMP's denoise-and-combine. Damping: beta1 on the new estimate
// and its residual, beta2 on the new cross-variance row.
SolverTrace run_mamp(const ProblemInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior, const SpectralModel& spectral) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("run_mamp: prior has no MMSE denoiser");
  }
  if (spectral.depth() < 2 * cfg.max_iters) {
    throw std::invalid_argument("run_mamp: spectral model depth must be >= 2*max_iters");
  }
  if (!(cfg.damping1 > 0.0 && cfg.damping1 <= 1.0 && cfg.damping2 > 0.0 &&
        cfg.damping2 <= 1.0)) {
    throw std::invalid_argument("run_mamp: damping factors must be in (0, 1]");
  }

  const Eigen::Index n = inst.H.cols();
  const double nn = static_cast<double>(n);
  const double beta1 = cfg.damping1;
  const double beta2 = cfg.damping2;
  const double w0 = spectral.w0();
  const double lam_dag = spectral.lambda_dagger();

  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};
  MampPipeline pipeline(spectral, inst.sigma_w2);

  std::vector<Eigen::VectorXd> x_hist;   // x_hat^(1..t)
  std::vector<Eigen::VectorXd> zt_hist;  // residuals y - H x_hat^(1..t)
  x_hist.push_back(Eigen::VectorXd::Zero(n));
  zt_hist.push_back(inst.y);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(inst.H.rows());

  // The whole table, v_hat_{1,1} included, comes from the residual inner
  // products so the xi* quadratic sees self-consistent statistics (the
  // realized signal power fluctuates a few percent around E[X^2] at desk
  // scale, and mixing the theoretical value in destabilizes the minimizer).
  Eigen::MatrixXd v_cross =
      Eigen::MatrixXd::Zero(cfg.max_iters + 1, cfg.max_iters + 1);
  v_cross(0, 0) = std::max(
      (inst.y.squaredNorm() / nn - inst.alpha * inst.sigma_w2) / w0, kVarianceFloor);

  bool warned_cap = false;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    const MampPipeline::Step step = pipeline.advance(v_cross);
    if (step.xi_capped && !warned_cap) {
      trace.notes.push_back("xi* denominator vanished; capped at 1e6");
      warned_cap = true;
    }
    if (!std::isfinite(step.tau2) || !std::isfinite(step.epsilon) ||
        step.epsilon == 0.0) {
      trace.status = SolverStatus::Diverged;
      trace.notes.push_back("coefficient pipeline produced non-finite values");
      break;
    }

    z = step.theta * (lam_dag * z - inst.H * (inst.H.transpose() * z)) +
        step.xi * zt_hist[t - 1];
    Eigen::VectorXd r = inst.H.transpose() * z;
    for (int i = 1; i <= t; ++i) r += pipeline.p(t, i) * x_hist[i - 1];
    r /= step.epsilon;
    const double tau2 = step.tau2;

    const DenoiserResult den = mmse_denoise(prior, r, tau2);
    const double v_mmse = std::max(den.avg_var, kVarianceFloor);
    if (v_mmse >= tau2) {
      detail::record_iteration(trace, inst, stop, den.mean, den.mean, r,
                               inst.y - inst.H * den.mean, tau2, v_mmse);
      trace.status = SolverStatus::Converged;
      trace.notes.push_back("denoiser variance reached the channel variance; stopped at floor");
      break;
    }
    const double v_next = 1.0 / (1.0 / v_mmse - 1.0 / tau2);
    Eigen::VectorXd x_new = v_next * (den.mean / v_mmse - r / tau2);
    x_new = beta1 * x_new + (1.0 - beta1) * x_hist[t - 1];
    const Eigen::VectorXd zt_new = inst.y - inst.H * x_new;

    // Cross-variance row from residual inner products, then beta2 damping
    // against the previous row (diagonally aligned).
    x_hist.push_back(x_new);
    zt_hist.push_back(zt_new);
    for (int j = 1; j <= t + 1; ++j) {
      v_cross(t, j - 1) =
          (zt_new.dot(zt_hist[j - 1]) / nn - inst.alpha * inst.sigma_w2) / w0;
    }
    for (int i = t + 1; i >= 2; --i) {
      v_cross(t, i - 1) = beta2 * v_cross(t, i - 1) + (1.0 - beta2) * v_cross(t - 1, i - 2);
    }
    v_cross(t, t) = std::max(v_cross(t, t), kVarianceFloor);
    for (int j = 1; j <= t; ++j) v_cross(j - 1, t) = v_cross(t, j - 1);

    if (!detail::record_iteration(trace, inst, stop, den.mean, x_new, r, zt_new, tau2,
                                  v_cross(t, t))) {
      break;
    }
  }

  const int steps = static_cast<int>(x_hist.size());
  trace.v_cross = v_cross.topLeftCorner(steps, steps);
  return trace;
}

}  // namespace ampkit
