#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ampkit {

// Eigenvalue-derived quantities of H H^T shared by MAMP and the OAMP/MAMP
// state evolutions. With B = lambda_dagger I - H H^T and W_t = H^T B^t H:
//   w_t        = (1/N) Tr(W_t)        = (1/N) sum_i lam_i (lam_dag - lam_i)^t
//   s_k        = (1/N) Tr(B^k (HH^T)^2) = (1/N) sum_i lam_i^2 (lam_dag - lam_i)^k
//   w_bar(i,j) = (1/N) Tr(W_i W_j) - w_i w_j = s_{i+j} - w_i w_j
// Immutable after construction; shared read-only.
class SpectralModel {
 public:
  // Moment tables cover w_t and s_k for t, k in [0, depth].
  SpectralModel(const Eigen::MatrixXd& H, int depth);

  // Direct construction from precomputed tables (alternate backends / tests).
  static SpectralModel from_tables(Eigen::VectorXd eigenvalues, double lambda_dagger,
                                   std::vector<double> w, std::vector<double> s,
                                   Eigen::Index n);

  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }  // of HH^T, size M
  double lambda_dagger() const { return lambda_dagger_; }
  Eigen::Index rows() const { return eigenvalues_.size(); }
  Eigen::Index cols() const { return n_; }
  int depth() const { return static_cast<int>(w_.size()) - 1; }

  double w(int t) const;
  double w0() const { return w_[0]; }
  double w_bar(int i, int j) const;

  // (1/N) Tr(H^T (HH^T + zeta I)^{-1} H) = (1/N) sum_i lam_i / (lam_i + zeta),
  // i.e. the LMMSE trace ratio over the N-eigenvalue spectrum of H^T H
  // (zero block included through the 1/N normalization).
  double lmmse_trace_ratio(double zeta) const;

 private:
  SpectralModel() = default;
  Eigen::VectorXd eigenvalues_;
  double lambda_dagger_ = 0.0;
  Eigen::Index n_ = 0;
  std::vector<double> w_;
  std::vector<double> s_;
};

SpectralModel build_spectral_model(const Eigen::MatrixXd& H, int depth);

}  // namespace ampkit
