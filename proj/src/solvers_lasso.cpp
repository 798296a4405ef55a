#include <cmath>

#include "ampkit/solvers.hpp"
#include "trace_util.hpp"

namespace ampkit {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Ista: return "ista";
    case Algorithm::Fista: return "fista";
    case Algorithm::AmpLasso: return "amp";
    case Algorithm::BayesAmp: return "bayes_amp";
    case Algorithm::Oamp: return "oamp";
    case Algorithm::Vamp: return "vamp";
    case Algorithm::Mamp: return "mamp";
  }
  return "?";
}

namespace {

void check_lasso_cfg(const SolverConfig& cfg, bool needs_step) {
  if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (needs_step && !(cfg.step_size > 0.0 && cfg.step_size <= 1.0)) {
    throw std::invalid_argument("step_size must be in (0, 1]");
  }
}

}  // namespace

SolverTrace run_ista(const ProblemInstance& inst, const SolverConfig& cfg) {
  check_lasso_cfg(cfg, true);
  const double a = cfg.step_size;
  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};

  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(inst.H.cols());
  Eigen::VectorXd z = inst.y;  // y - H*0
  for (int t = 1; t <= cfg.max_iters; ++t) {
    const Eigen::VectorXd r = x_hat + a * (inst.H.transpose() * z);
    x_hat = soft_threshold(r, a * cfg.lambda).mean;
    z = inst.y - inst.H * x_hat;
    if (!detail::record_iteration(trace, inst, stop, x_hat, {}, r, z, 0.0, 0.0)) break;
  }
  return trace;
}

SolverTrace run_fista(const ProblemInstance& inst, const SolverConfig& cfg) {
  check_lasso_cfg(cfg, true);
  const double a = cfg.step_size;
  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};

  Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(inst.H.cols());
  Eigen::VectorXd x_prev2 = x_prev;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    // Momentum coefficient (t-2)/(t+1); zero extrapolation for t <= 2.
    const double beta = static_cast<double>(t - 2) / static_cast<double>(t + 1);
    const Eigen::VectorXd v = x_prev + beta * (x_prev - x_prev2);
    const Eigen::VectorXd z = inst.y - inst.H * v;
    const Eigen::VectorXd r = v + a * (inst.H.transpose() * z);
    Eigen::VectorXd x_new = soft_threshold(r, a * cfg.lambda).mean;
    const Eigen::VectorXd resid = inst.y - inst.H * x_new;
    x_prev2 = std::move(x_prev);
    x_prev = std::move(x_new);
    if (!detail::record_iteration(trace, inst, stop, x_prev, {}, r, resid, 0.0, 0.0)) break;
  }
  return trace;
}

SolverTrace run_amp_lasso(const ProblemInstance& inst, const SolverConfig& cfg) {
  check_lasso_cfg(cfg, false);
  const double alpha = inst.alpha;
  SolverTrace trace;
  detail::StopState stop{cfg.stop_tol};

  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(inst.H.cols());
  Eigen::VectorXd z = inst.y;           // first residual; Onsager term vanishes
  double big_v = 1.0 / alpha;           // V^(1) from v_hat^(1) = 1
  double tau_hat = cfg.lambda * big_v;  // threshold state, tau_hat = lambda V

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const Eigen::VectorXd r = x_hat + inst.H.transpose() * z;
    const double threshold = cfg.lambda + tau_hat;
    const DenoiserResult den = soft_threshold(r, threshold);
    x_hat = den.mean;
    const Eigen::VectorXd resid = inst.y - inst.H * x_hat;
    // Onsager correction keeps the next input error Gaussian.
    z = resid + (den.avg_deriv / alpha) * z;
    const double tau_recorded = tau_hat;
    big_v = (1.0 + big_v) * den.avg_deriv / alpha;
    tau_hat = (threshold / alpha) * den.avg_deriv;
    if (!detail::record_iteration(trace, inst, stop, x_hat, {}, r, resid, tau_recorded,
                                  big_v)) {
      break;
    }
  }
  return trace;
}

GeneralRecursion run_general_recursion(const ProblemInstance& inst, const ScalarMap& f,
                                       const ScalarMap& g, int iters) {
  const Eigen::VectorXd noise = inst.y - inst.H * inst.x;
  const double alpha = inst.alpha;

  GeneralRecursion out;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(inst.H.cols());
  Eigen::VectorXd m_prev;  // m^(-1) absent
  for (int t = 0; t < iters; ++t) {
    auto [q, f_deriv] = f(t, h, inst.x);
    const double lambda_t = f_deriv / alpha;
    Eigen::VectorXd b = inst.H * q;
    if (m_prev.size() > 0) b -= lambda_t * m_prev;
    auto [m, g_deriv] = g(t, b, noise);
    h = inst.H.transpose() * m - g_deriv * q;

    out.q.push_back(std::move(q));
    out.b.push_back(std::move(b));
    out.m.push_back(m);
    out.h.push_back(h);
    m_prev = std::move(m);
  }
  return out;
}

}  // namespace ampkit
