#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "ampkit/denoise.hpp"
#include "ampkit/model.hpp"
#include "ampkit/spectral.hpp"

namespace ampkit {

enum class Algorithm { Ista, Fista, AmpLasso, BayesAmp, Oamp, Vamp, Mamp };

enum class WChoice { MF, PseudoInverse, Lmmse };

enum class SolverStatus { Running, Converged, Diverged };

struct SolverConfig {
  Algorithm algorithm = Algorithm::AmpLasso;
  int max_iters = 100;
  double step_size = 1.0;     // ISTA/FISTA, in (0, 1]
  double lambda = 0.0;        // LASSO weight (ISTA/FISTA/AmpLasso)
  double damping1 = 1.0;      // MAMP beta1, in (0, 1]
  double damping2 = 1.0;      // MAMP beta2, in (0, 1]
  double stop_tol = 1e-8;     // relative NMSE change threshold (0 disables)
  WChoice w_choice = WChoice::Lmmse;  // OAMP only
};

// Per-iteration record shared by all solvers. Iteration k (1-based) fills
// index k-1 of every sequence:
//   estimates  - the reported estimate (the MMSE-denoiser output for
//                OAMP/VAMP/MAMP; the iterate itself elsewhere); NMSE is
//                computed on this.
//   extrinsics - the estimate propagated to the next linear step where it
//                differs from the reported one (OAMP/VAMP/MAMP), else empty.
//   inputs     - the denoiser input r^(k).
//   residuals  - y - H * (propagated estimate).
//   tau2       - input-variance state (threshold state tau_hat for AmpLasso,
//                mean Sigma_i for BayesAmp, tau_t^2 for OAMP/MAMP, gamma1
//                for VAMP; 0 for ISTA/FISTA which track none).
//   v_hat      - output-variance state (v^(k+1), gamma2 for VAMP).
// A solver stops at max_iters, or Converged when the relative NMSE change
// stays below stop_tol for 3 consecutive iterations (or the divergence-free
// stage hits its variance floor), or Diverged on non-finite iterates or
// NMSE > 1e6.
struct SolverTrace {
  std::vector<Eigen::VectorXd> estimates;
  std::vector<Eigen::VectorXd> extrinsics;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> residuals;
  std::vector<double> tau2;
  std::vector<double> v_hat;
  std::vector<double> nmse_db;
  Eigen::MatrixXd v_cross;  // MAMP cross-variance table (final snapshot)
  SolverStatus status = SolverStatus::Running;
  std::vector<std::string> notes;

  int iterations() const { return static_cast<int>(nmse_db.size()); }
  double final_nmse_db() const { return nmse_db.empty() ? 0.0 : nmse_db.back(); }
};

SolverTrace run_ista(const ProblemInstance& inst, const SolverConfig& cfg);
SolverTrace run_fista(const ProblemInstance& inst, const SolverConfig& cfg);
SolverTrace run_amp_lasso(const ProblemInstance& inst, const SolverConfig& cfg);
SolverTrace run_bayes_amp(const ProblemInstance& inst, const SolverConfig& cfg,
                          const PriorSpec& prior);
SolverTrace run_oamp(const ProblemInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior);
SolverTrace run_vamp(const ProblemInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior);
SolverTrace run_mamp(const ProblemInstance& inst, const SolverConfig& cfg,
                     const PriorSpec& prior, const SpectralModel& spectral);

// (1/N) Tr[(H^T H / sigma_w2 + I / gamma2)^{-1}] from the eigenvalues of
// H^T H (the VAMP linear-stage variance, Eq.-level helper).
double vamp_linear_variance(const Eigen::VectorXd& gram_eigenvalues, Eigen::Index n,
                            double sigma_w2, double gamma2);

// General scalar-map recursion
//   q^(t) = f(t, h^(t), x),   b^(t) = H q^(t) - lambda_t m^(t-1),
//   m^(t) = g(t, b^(t), n),   h^(t+1) = H^T m^(t) - xi_t q^(t),
// with xi_t = <g'>, lambda_t = <f'>/alpha, h^(0) = 0, m^(-1) = 0. The maps
// return the transformed vector together with the empirical mean derivative
// with respect to their first argument.
using ScalarMap = std::function<std::pair<Eigen::VectorXd, double>(
    int t, const Eigen::VectorXd& arg, const Eigen::VectorXd& side)>;

struct GeneralRecursion {
  std::vector<Eigen::VectorXd> h;  // h^(1) .. h^(iters)
  std::vector<Eigen::VectorXd> b;  // b^(0) .. b^(iters-1)
  std::vector<Eigen::VectorXd> q;  // q^(0) .. q^(iters-1)
  std::vector<Eigen::VectorXd> m;  // m^(0) .. m^(iters-1)
};

GeneralRecursion run_general_recursion(const ProblemInstance& inst, const ScalarMap& f,
                                       const ScalarMap& g, int iters);

const char* algorithm_name(Algorithm a);

}  // namespace ampkit
