#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ampkit/spectral.hpp"

namespace ampkit {

// The MAMP coefficient recursion, shared verbatim by the solver and its state
// evolution (they differ only in where the cross-variance table comes from).
// Per iteration t it produces, from the spectral moments and the table
// [v_hat_{i,j}]:
//   theta_t   = (lambda_dagger + sigma_w^2 / v_hat_{t,t})^{-1}
//   vartheta_{t,i} = theta_t * vartheta_{t-1,i} (i < t), vartheta_{t,t} = xi_t
//   p_{t,i}   = vartheta_{t,i} w_{t-i},   epsilon_t = sum_i p_{t,i}
//   xi_t      = (c2 c0 + c3) / (c1 c0 + c2)  (minimizer of tau_{t,t}^2)
//   tau_{t,t}^2 = (c1 xi^2 - 2 c2 xi + c3) / (w0^2 (xi + c0)^2)
// At t = 1 the objective is constant in xi (c0 = c2 = c3 = 0), so xi_1 = 1;
// a vanishing denominator at t >= 2 is the paper's "+inf" branch and is
// realized as a finite cap of 1e6.
class MampPipeline {
 public:
  MampPipeline(const SpectralModel& spectral, double sigma_w2);

  struct Step {
    double theta = 0.0;
    double xi = 0.0;
    double epsilon = 0.0;
    double tau2 = 0.0;  // tau_{t,t}^2
    bool xi_capped = false;
  };

  // Advances to iteration t = iterations()+1. v_cross(i-1, j-1) must hold
  // v_hat_{i,j} for i, j <= t (only entries up to t are read).
  Step advance(const Eigen::MatrixXd& v_cross);

  // tau_{t1,t2}^2 cross-covariance of input errors; both rows must already be
  // advanced.
  double cross_tau2(int t1, int t2, const Eigen::MatrixXd& v_cross) const;

  int iterations() const { return static_cast<int>(rows_.size()); }
  double vartheta(int t, int i) const { return rows_[t - 1][i - 1]; }
  double p(int t, int i) const { return rows_[t - 1][i - 1] * spectral_->w(t - i); }
  double epsilon(int t) const { return epsilons_[t - 1]; }
  double theta(int t) const { return thetas_[t - 1]; }
  double xi(int t) const { return rows_[t - 1][t - 1]; }

  static constexpr double kXiCap = 1e6;

 private:
  const SpectralModel* spectral_;
  double sigma_w2_;
  std::vector<std::vector<double>> rows_;  // vartheta rows, row t has entries i=1..t
  std::vector<double> thetas_;
  std::vector<double> epsilons_;
};

}  // namespace ampkit
