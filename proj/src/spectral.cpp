#include "ampkit/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ampkit {

SpectralModel::SpectralModel(const Eigen::MatrixXd& H, int depth) {
  if (depth < 0) throw std::invalid_argument("SpectralModel: depth must be >= 0");
  const Eigen::Index m = H.rows();
  n_ = H.cols();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H * H.transpose(),
                                                    Eigen::EigenvaluesOnly);
  eigenvalues_ = es.eigenvalues().cwiseMax(0.0);
  if (!eigenvalues_.allFinite()) {
    throw std::invalid_argument("SpectralModel: non-finite eigenvalues");
  }
  lambda_dagger_ = 0.5 * (eigenvalues_(m - 1) + eigenvalues_(0));

  w_.assign(depth + 1, 0.0);
  s_.assign(depth + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lam = eigenvalues_(i);
    const double base = lambda_dagger_ - lam;
    double pow_t = 1.0;
    for (int t = 0; t <= depth; ++t, pow_t *= base) {
      w_[t] += inv_n * lam * pow_t;
      s_[t] += inv_n * lam * lam * pow_t;
    }
  }
}

SpectralModel SpectralModel::from_tables(Eigen::VectorXd eigenvalues, double lambda_dagger,
                                         std::vector<double> w, std::vector<double> s,
                                         Eigen::Index n) {
  if (w.size() != s.size() || w.empty()) {
    throw std::invalid_argument("SpectralModel::from_tables: table size mismatch");
  }
  SpectralModel model;
  model.eigenvalues_ = std::move(eigenvalues);
  model.lambda_dagger_ = lambda_dagger;
  model.n_ = n;
  model.w_ = std::move(w);
  model.s_ = std::move(s);
  return model;
}

double SpectralModel::w(int t) const {
  if (t < 0 || t >= static_cast<int>(w_.size())) {
    throw std::out_of_range("SpectralModel::w: moment depth exceeded");
  }
  return w_[t];
}

double SpectralModel::w_bar(int i, int j) const {
  const int k = i + j;
  if (i < 0 || j < 0 || k >= static_cast<int>(s_.size())) {
    throw std::out_of_range("SpectralModel::w_bar: moment depth exceeded");
  }
  return s_[k] - w(i) * w(j);
}

double SpectralModel::lmmse_trace_ratio(double zeta) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    acc += eigenvalues_(i) / (eigenvalues_(i) + zeta);
  }
  return acc / static_cast<double>(n_);
}

SpectralModel build_spectral_model(const Eigen::MatrixXd& H, int depth) {
  return SpectralModel(H, depth);
}

}  // namespace ampkit
