#include "ampkit/diag.hpp"

#include <algorithm>
#include <cmath>

#include "ampkit/solvers.hpp"

namespace ampkit {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
  }
  // Acklam's rational approximation, polished with one Newton step on the CDF.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = normal_cdf(x) - p;
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return x - err / pdf;
}

GaussianityReport gaussianity(const Eigen::VectorXd& error) {
  const Eigen::Index n = error.size();
  if (n < 30) throw std::invalid_argument("gaussianity: need at least 30 samples");
  const double mean = error.mean();
  const double var = (error.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (var <= 0.0) throw DegenerateSampleError("gaussianity: zero sample variance");
  const double sd = std::sqrt(var);

  std::vector<double> z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = (error(i) - mean) / sd;
  std::sort(z.begin(), z.end());

  GaussianityReport rep;
  const double nn = static_cast<double>(n);
  double d = 0.0;
  rep.qq_points.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double cdf = normal_cdf(z[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / nn));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / nn));
    rep.qq_points.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / nn), z[i]);
  }
  rep.ks_statistic = d;
  rep.ks_critical_1pct = kKs1pctConstant / std::sqrt(nn);
  return rep;
}

namespace {

double normalized_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  // (a.b/N) / (rms(a) rms(b)) collapses to the cosine.
  return a.dot(b) / (na * nb);
}

}  // namespace

std::vector<double> orthogonality_report(const Eigen::VectorXd& h,
                                         const std::vector<Eigen::VectorXd>& q_history,
                                         const Eigen::VectorXd& x) {
  if (h.size() != x.size()) throw std::invalid_argument("orthogonality_report: length mismatch");
  std::vector<double> out;
  out.reserve(q_history.size() + 1);
  out.push_back(normalized_inner(h, x));
  for (const auto& q : q_history) {
    if (q.size() != h.size()) {
      throw std::invalid_argument("orthogonality_report: length mismatch in history");
    }
    out.push_back(normalized_inner(h, q));
  }
  return out;
}

EquivalenceResult equivalence_check(const ProblemInstance& inst, const PriorSpec& prior,
                                    int iters) {
  SolverConfig cfg;
  cfg.max_iters = iters;
  cfg.stop_tol = 0.0;  // run the full budget lock-step
  cfg.w_choice = WChoice::Lmmse;

  cfg.algorithm = Algorithm::Oamp;
  const SolverTrace oamp = run_oamp(inst, cfg, prior);
  cfg.algorithm = Algorithm::Vamp;
  const SolverTrace vamp = run_vamp(inst, cfg, prior);

  EquivalenceResult res;
  res.iterations = std::min(oamp.iterations(), vamp.iterations());
  for (int t = 0; t < res.iterations; ++t) {
    const double dev_r =
        (oamp.inputs[t] - vamp.inputs[t]).norm() / vamp.inputs[t].norm();
    const double dev_g = std::abs(oamp.tau2[t] - vamp.tau2[t]) / vamp.tau2[t];
    res.max_iterate_dev = std::max(res.max_iterate_dev, dev_r);
    res.max_variance_dev = std::max(res.max_variance_dev, dev_g);
  }
  return res;
}

}  // namespace ampkit
