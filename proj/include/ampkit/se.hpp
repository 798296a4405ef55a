#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ampkit/model.hpp"
#include "ampkit/quadrature.hpp"
#include "ampkit/spectral.hpp"

namespace ampkit {

// Per-iteration state-evolution record. mse_pred is the predicted MSE of the
// denoiser output in linear units; nmse_pred_db() rescales by the prior's
// second moment so the curves compare directly with solver NMSE traces.
struct SeTrace {
  std::vector<double> tau2;
  std::vector<double> v_hat;
  std::vector<double> mse_pred;
  double signal_power = 1.0;  // E[X^2] of the prior
  Eigen::MatrixXd xi;       // MAMP: input-error covariance table [tau_{i,j}^2]
  Eigen::MatrixXd v_cross;  // MAMP: output-error covariance table [v_hat_{i,j}]
  bool degenerate = false;  // stopped early (variance floor / PSD loss)

  std::vector<double> mse_pred_db() const;
  std::vector<double> nmse_pred_db() const;
  double final_nmse_db() const;
  int iterations() const { return static_cast<int>(mse_pred.size()); }
};

// Scalar AMP state evolution tau_{t+1}^2 = sigma_w2 + E{(eta_t(X + tau_t Z) - X)^2}/alpha
// with tau_0^2 = sigma_w2 + E[X^2]/alpha. Expectations are Gauss-Hermite over
// the exact prior mixture; no Monte Carlo.
SeTrace amp_se(const PriorSpec& prior, double sigma_w2, double alpha, int iters,
               const QuadratureCfg& cfg = {});

// OAMP state evolution over the realized eigenvalue spectrum:
//   LE:  tau_t^2 = v^(t) (1/E{lam/(lam + sigma_w2/v^(t))} - 1)
//   NLE: v_mmse = mmse(tau_t^2), v^(t+1) = (1/v_mmse - 1/tau_t^2)^{-1}.
SeTrace oamp_se(const PriorSpec& prior, double sigma_w2, const SpectralModel& spectral,
                int iters, const QuadratureCfg& cfg = {});

// MAMP covariance state evolution. Maintains the input-error covariance
// Xi_t = [tau_{i,j}^2] through the same coefficient pipeline as run_mamp; the
// output-error covariances v_hat_{i,j} are estimated by Monte Carlo with
// joint-Gaussian noise histories drawn from N(0, Xi_t) applied to sampled
// signals (mc_samples draws, deterministic for a fixed seed). Damping factors
// mirror the solver's.
SeTrace mamp_se(const PriorSpec& prior, double sigma_w2, const SpectralModel& spectral,
                int iters, int mc_samples, std::uint64_t seed, double damping1 = 1.0,
                double damping2 = 1.0, const QuadratureCfg& cfg = {});

}  // namespace ampkit
