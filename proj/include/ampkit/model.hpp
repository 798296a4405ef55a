#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ampkit {

class UnsupportedPriorError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class DegenerateDenoiserError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DegenerateSampleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PriorKind { BernoulliGaussian, Discrete, LaplaceLasso };

// Signal law. BernoulliGaussian(mu, rho) = rho*N(mu, 1/rho) + (1-rho)*delta0,
// so the nonzero-component variance is 1/rho and E[X^2] = 1 + rho*mu^2 (unit
// power at mu = 0). Discrete is a finite set of distinct levels with
// probabilities. LaplaceLasso carries no sampling law; it only marks the
// mismatched/LASSO setting together with its regularization weight.
struct PriorSpec {
  PriorKind kind = PriorKind::BernoulliGaussian;
  double rho = 1.0;                    // BernoulliGaussian sparsity, in (0, 1]
  double mu = 0.0;                     // BernoulliGaussian nonzero mean
  std::vector<double> levels;          // Discrete
  std::vector<double> probs;           // Discrete
  double lambda = 0.0;                 // LaplaceLasso

  static PriorSpec bernoulli_gaussian(double mu, double rho);
  static PriorSpec discrete(std::vector<double> levels, std::vector<double> probs);
  // Real per-dimension reduction of unit-power QPSK: {-1/sqrt(2), +1/sqrt(2)}.
  static PriorSpec qpsk();
  static PriorSpec laplace_lasso(double lambda);

  bool samplable() const { return kind != PriorKind::LaplaceLasso; }
  double second_moment() const;  // E[X^2]
};

enum class MatrixKind { IidGaussian, Conditioned };

struct MatrixSpec {
  MatrixKind kind = MatrixKind::IidGaussian;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  double kappa = 1.0;         // Conditioned: sigma_max/sigma_min, >= 1
  std::uint64_t seed = 0;     // used by gen_matrix(spec)
};

// One synthesized recovery task y = Hx + n.
struct ProblemInstance {
  Eigen::MatrixXd H;
  Eigen::VectorXd x;       // ground truth
  Eigen::VectorXd y;
  double sigma_w2 = 0.0;   // noise variance, > 0
  double alpha = 0.0;      // M/N
};

// Entries IID N(0, 1/m); deterministic per seed.
Eigen::MatrixXd gen_iid_gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

// Factors of a conditioned matrix H = U diag(sigma) V^T with U (m x m) and
// V (n x m) Haar-orthonormal, geometric singular values with
// sigma_max/sigma_min = kappa exactly, and sum sigma_i^2 = n.
struct ConditionedFactors {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;
};
ConditionedFactors gen_conditioned_factors(Eigen::Index m, Eigen::Index n, double kappa,
                                           std::uint64_t seed);
Eigen::MatrixXd gen_conditioned(Eigen::Index m, Eigen::Index n, double kappa,
                                std::uint64_t seed);

Eigen::MatrixXd gen_matrix(const MatrixSpec& spec);
Eigen::MatrixXd gen_matrix(const MatrixSpec& spec, std::uint64_t seed);

// n IID draws from a samplable prior; deterministic per seed.
Eigen::VectorXd sample_prior(const PriorSpec& prior, Eigen::Index n, std::uint64_t seed);

// Builds the full instance: sigma_w2 = 10^(-snr_db/10), y = Hx + n. The
// matrix, signal, and noise draws come from independent named substreams of
// the given seed so each component can be varied on its own.
ProblemInstance synthesize(const MatrixSpec& matrix_spec, const PriorSpec& prior,
                           double snr_db, std::uint64_t seed);

// ||estimate - truth||^2 / ||truth||^2; rejects all-zero truth.
double nmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);
double nmse_db(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

// 10*log10 with a -300 dB floor so exact zeros stay finite.
double to_db(double value);

}  // namespace ampkit
