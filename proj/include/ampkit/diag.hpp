#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ampkit/model.hpp"

namespace ampkit {

// One-sample Kolmogorov-Smirnov report against the standard normal, computed
// on the standardized sample. The 1% critical value uses the asymptotic
// c(0.01)/sqrt(n) with c(0.01) = 1.628.
struct GaussianityReport {
  double ks_statistic = 0.0;
  double ks_critical_1pct = 0.0;
  std::vector<std::pair<double, double>> qq_points;  // (theoretical, empirical)
  bool standardized = true;

  bool passes_1pct() const { return ks_statistic <= ks_critical_1pct; }
};

inline constexpr double kKs1pctConstant = 1.628;

GaussianityReport gaussianity(const Eigen::VectorXd& error);

// Standard normal CDF and its inverse (Acklam seed + one Newton step).
double normal_cdf(double z);
double normal_quantile(double p);

// Scale-free orthogonality probe: entry 0 is h.x/(|h||x|) cosine form of
// (h^T x / N) normalized by the vectors' root-mean-squares, followed by one
// entry per history vector q^(i).
std::vector<double> orthogonality_report(const Eigen::VectorXd& h,
                                         const std::vector<Eigen::VectorXd>& q_history,
                                         const Eigen::VectorXd& x);

// Lock-step OAMP(LMMSE) vs VAMP run under the init mapping r2 = x_hat^(1),
// gamma2 = v_hat^(1).
struct EquivalenceResult {
  double max_iterate_dev = 0.0;   // max_t ||r^(t) - r1^(t)|| / ||r1^(t)||
  double max_variance_dev = 0.0;  // max_t |tau_t^2 - gamma1^(t)| / gamma1^(t)
  int iterations = 0;

  double max_deviation() const { return std::max(max_iterate_dev, max_variance_dev); }
};

EquivalenceResult equivalence_check(const ProblemInstance& inst, const PriorSpec& prior,
                                    int iters);

}  // namespace ampkit
