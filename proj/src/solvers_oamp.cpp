#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "ampkit/solvers.hpp"
#include "trace_util.hpp"

namespace ampkit {

namespace {

// Spectral weights g_i of the de-correlation candidate W_hat = V g(Sigma) U^T.
Eigen::VectorXd w_hat_weights(const Eigen::VectorXd& sig, WChoice choice, double zeta) {
  Eigen::VectorXd g(sig.size());
  switch (choice) {
    case WChoice::MF:
      g = sig;
      break;
    case WChoice::PseudoInverse:
      g = sig.cwiseInverse();
      break;
    case WChoice::Lmmse:
      g = sig.array() / (sig.array().square() + zeta);
      break;
  }
  return g;
}

}  // namespace

SolverTrace run_oamp(const ProblemInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("run_oamp: prior has no MMSE denoiser");
  }
  const Eigen::Index m = inst.H.rows();
  const Eigen::Index n = inst.H.cols();
  const double nn = static_cast<double>(n);

  // One SVD up front; every W_t application is then a scaled spectral map.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(inst.H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd& U = svd.matrixU();
  const Eigen::MatrixXd& V = svd.matrixV();
  const Eigen::VectorXd& sig = svd.singularValues();

  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};

  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(n);
  double v_hat = prior.second_moment();

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const double zeta = inst.sigma_w2 / std::max(v_hat, kVarianceFloor);
    const Eigen::VectorXd g = w_hat_weights(sig, cfg.w_choice, zeta);
    const double tr_wh = g.dot(sig);
    const double scale = nn / tr_wh;  // enforces Tr(I - W_t H) = 0

    const Eigen::VectorXd resid = inst.y - inst.H * x_hat;
    const Eigen::VectorXd r =
        x_hat + scale * (V * g.cwiseProduct(U.transpose() * resid));

    double tau2;
    if (cfg.w_choice == WChoice::Lmmse) {
      tau2 = v_hat * (nn / tr_wh - 1.0);
    } else {
      // General error-propagation trace formula (the LMMSE shortcut above is
      // its closed form only for the LMMSE W_hat).
      const Eigen::ArrayXd wh_spec = scale * g.cwiseProduct(sig).array();
      const double tr_bbt = (1.0 - wh_spec).square().sum() + static_cast<double>(n - m);
      const double tr_wwt = scale * scale * g.squaredNorm();
      tau2 = (tr_bbt * v_hat + tr_wwt * inst.sigma_w2) / nn;
    }
    tau2 = std::max(tau2, kVarianceFloor);

    const DenoiserResult den = mmse_denoise(prior, r, tau2);
    const double v_mmse = std::max(den.avg_var, kVarianceFloor);
    if (v_mmse >= tau2) {
      // Variance-cancellation constant is singular: stop at the floor.
      detail::record_iteration(trace, inst, stop, den.mean, den.mean, r,
                               inst.y - inst.H * den.mean, tau2, v_mmse);
      trace.status = SolverStatus::Converged;
      trace.notes.push_back("denoiser variance reached the channel variance; stopped at floor");
      break;
    }
    const double v_next = 1.0 / (1.0 / v_mmse - 1.0 / tau2);
    x_hat = v_next * (den.mean / v_mmse - r / tau2);
    if (!detail::record_iteration(trace, inst, stop, den.mean, x_hat, r,
                                  inst.y - inst.H * x_hat, tau2, v_next)) {
      break;
    }
    v_hat = v_next;
  }
  return trace;
}

double vamp_linear_variance(const Eigen::VectorXd& gram_eigenvalues, Eigen::Index n,
                            double sigma_w2, double gamma2) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < gram_eigenvalues.size(); ++i) {
    acc += 1.0 / (gram_eigenvalues(i) / sigma_w2 + 1.0 / gamma2);
  }
  // Eigenvalues may be given for HH^T only; the N - M zero modes of H^T H
  // each contribute gamma2.
  acc += static_cast<double>(n - gram_eigenvalues.size()) * gamma2;
  return acc / static_cast<double>(n);
}

SolverTrace run_vamp(const ProblemInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("run_vamp: prior has no MMSE denoiser");
  }
  if (!(inst.sigma_w2 > 0.0)) {
    throw std::invalid_argument("run_vamp: sigma_w2 must be > 0");
  }
  const Eigen::Index n = inst.H.cols();
  const double sw2 = inst.sigma_w2;

  // Gram matrix and H^T y once; the per-iteration solve stays a direct
  // factorization (no SVD on this path).
  const Eigen::MatrixXd gram = inst.H.transpose() * inst.H;
  const Eigen::VectorXd hty = inst.H.transpose() * inst.y;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.H * inst.H.transpose(),
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd gram_eigs = es.eigenvalues().cwiseMax(0.0);

  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};

  Eigen::VectorXd r2 = Eigen::VectorXd::Zero(n);
  double gamma2 = prior.second_moment();

  for (int t = 1; t <= cfg.max_iters; ++t) {
    Eigen::MatrixXd a = gram / sw2;
    a.diagonal().array() += 1.0 / gamma2;
    const Eigen::VectorXd x1 = Eigen::LDLT<Eigen::MatrixXd>(a).solve(hty / sw2 + r2 / gamma2);
    const double v1 = vamp_linear_variance(gram_eigs, n, sw2, gamma2);
    if (v1 >= gamma2) {
      trace.status = SolverStatus::Diverged;
      trace.notes.push_back("gamma1 non-positive");
      break;
    }
    const double gamma1 = 1.0 / (1.0 / v1 - 1.0 / gamma2);
    const Eigen::VectorXd r1 = gamma1 * (x1 / v1 - r2 / gamma2);

    const DenoiserResult den = mmse_denoise(prior, r1, gamma1);
    const double v2 = std::max(den.avg_var, kVarianceFloor);
    if (v2 >= gamma1) {
      detail::record_iteration(trace, inst, stop, den.mean, den.mean, r1,
                               inst.y - inst.H * den.mean, gamma1, v2);
      trace.status = SolverStatus::Converged;
      trace.notes.push_back("denoiser variance reached gamma1; stopped at floor");
      break;
    }
    gamma2 = 1.0 / (1.0 / v2 - 1.0 / gamma1);
    r2 = gamma2 * (den.mean / v2 - r1 / gamma1);
    if (!detail::record_iteration(trace, inst, stop, den.mean, r2, r1,
                                  inst.y - inst.H * r2, gamma1, gamma2)) {
      break;
    }
  }
  return trace;
}

}  // namespace ampkit
