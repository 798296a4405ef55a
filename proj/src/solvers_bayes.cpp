#include <cmath>

#include "ampkit/solvers.hpp"
#include "trace_util.hpp"

namespace ampkit {

// Bayes-optimal AMP, per-component form: the factor-side variances V_a and
// the variable-side channel variances Sigma_i are tracked element-wise
// through the squared-entry matrix |h_ai|^2.
SolverTrace run_bayes_amp(const ProblemInstance& inst, const SolverConfig& cfg,
                          const PriorSpec& prior) {
  if (!prior.samplable()) {
    throw UnsupportedPriorError("run_bayes_amp: prior has no MMSE denoiser");
  }
  const Eigen::Index m = inst.H.rows();
  const Eigen::Index n = inst.H.cols();
  const Eigen::MatrixXd H2 = inst.H.cwiseAbs2();
  const double sw2 = inst.sigma_w2;

  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};

  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v_hat = Eigen::VectorXd::Constant(n, prior.second_moment());
  Eigen::VectorXd big_z = inst.y;  // Z^(0) = y makes the first correction vanish
  Eigen::VectorXd big_v_prev = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd h_x = Eigen::VectorXd::Zero(m);  // H * x_hat

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const Eigen::VectorXd big_v = H2 * v_hat;
    const Eigen::VectorXd denom_prev = big_v_prev.array() + sw2;
    big_z = h_x - big_v.cwiseProduct(inst.y - big_z).cwiseQuotient(denom_prev);
    const Eigen::VectorXd denom = big_v.array() + sw2;
    const Eigen::VectorXd sigma =
        (H2.transpose() * denom.cwiseInverse()).cwiseInverse();
    const Eigen::VectorXd r =
        x_hat + sigma.cwiseProduct(inst.H.transpose() *
                                   (inst.y - big_z).cwiseQuotient(denom));

    double var_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const ScalarPosterior p = scalar_posterior(prior, r(i), sigma(i));
      x_hat(i) = p.mean;
      v_hat(i) = p.var;
      var_sum += p.var;
    }
    h_x = inst.H * x_hat;
    big_v_prev = big_v;
    if (!detail::record_iteration(trace, inst, stop, x_hat, {}, r, inst.y - h_x,
                                  sigma.mean(), var_sum / static_cast<double>(n))) {
      break;
    }
  }
  return trace;
}

}  // namespace ampkit
