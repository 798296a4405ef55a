#include "ampkit/mamp_pipeline.hpp"

#include <cmath>

#include "ampkit/denoise.hpp"

namespace ampkit {

MampPipeline::MampPipeline(const SpectralModel& spectral, double sigma_w2)
    : spectral_(&spectral), sigma_w2_(sigma_w2) {}

MampPipeline::Step MampPipeline::advance(const Eigen::MatrixXd& v_cross) {
  const int t = iterations() + 1;
  const SpectralModel& sp = *spectral_;
  const double w0 = sp.w0();
  const double v_tt = std::max(v_cross(t - 1, t - 1), kVarianceFloor);

  Step step;
  step.theta = 1.0 / (sp.lambda_dagger() + sigma_w2_ / v_tt);

  std::vector<double> row(t, 0.0);
  for (int i = 1; i < t; ++i) row[i - 1] = step.theta * rows_.back()[i - 1];

  double c0 = 0.0, c2 = 0.0, c3 = 0.0;
  const double c1 = sigma_w2_ * w0 + v_tt * sp.w_bar(0, 0);
  for (int i = 1; i < t; ++i) {
    c0 += row[i - 1] * sp.w(t - i) / w0;
    c2 -= row[i - 1] * (sigma_w2_ * sp.w(t - i) + v_cross(t - 1, i - 1) * sp.w_bar(0, t - i));
    for (int j = 1; j < t; ++j) {
      c3 += row[i - 1] * row[j - 1] *
            (sigma_w2_ * sp.w(2 * t - i - j) + v_cross(i - 1, j - 1) * sp.w_bar(t - i, t - j));
    }
  }

  if (t == 1) {
    step.xi = 1.0;
  } else {
    const double denom = c1 * c0 + c2;
    if (denom == 0.0) {
      step.xi = kXiCap;
      step.xi_capped = true;
    } else {
      step.xi = (c2 * c0 + c3) / denom;
      if (std::abs(step.xi) > kXiCap) {
        step.xi = std::copysign(kXiCap, step.xi);
        step.xi_capped = true;
      }
    }
  }
  row[t - 1] = step.xi;

  step.epsilon = 0.0;
  for (int i = 1; i <= t; ++i) step.epsilon += row[i - 1] * sp.w(t - i);

  const double denom_tau = w0 * w0 * (step.xi + c0) * (step.xi + c0);
  step.tau2 = (c1 * step.xi * step.xi - 2.0 * c2 * step.xi + c3) / denom_tau;
  step.tau2 = std::max(step.tau2, kVarianceFloor);

  rows_.push_back(std::move(row));
  thetas_.push_back(step.theta);
  epsilons_.push_back(step.epsilon);
  return step;
}

double MampPipeline::cross_tau2(int t1, int t2, const Eigen::MatrixXd& v_cross) const {
  const SpectralModel& sp = *spectral_;
  double acc = 0.0;
  for (int i = 1; i <= t1; ++i) {
    for (int j = 1; j <= t2; ++j) {
      acc += vartheta(t1, i) * vartheta(t2, j) *
             (sigma_w2_ * sp.w(t1 + t2 - i - j) +
              v_cross(i - 1, j - 1) * sp.w_bar(t1 - i, t2 - j));
    }
  }
  return acc / (epsilon(t1) * epsilon(t2));
}

}  // namespace ampkit
