#include "ampkit/model.hpp"

#include <cmath>
#include <set>

#include "ampkit/rng.hpp"

namespace ampkit {

PriorSpec PriorSpec::bernoulli_gaussian(double mu, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("bernoulli_gaussian: rho must be in (0, 1]");
  }
  PriorSpec p;
  p.kind = PriorKind::BernoulliGaussian;
  p.mu = mu;
  p.rho = rho;
  return p;
}

PriorSpec PriorSpec::discrete(std::vector<double> levels, std::vector<double> probs) {
  if (levels.empty() || levels.size() != probs.size()) {
    throw std::invalid_argument("discrete: levels and probs must be non-empty and equal-sized");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("discrete: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete: probabilities must sum to 1");
  }
  if (std::set<double>(levels.begin(), levels.end()).size() != levels.size()) {
    throw std::invalid_argument("discrete: levels must be distinct");
  }
  PriorSpec p;
  p.kind = PriorKind::Discrete;
  p.levels = std::move(levels);
  p.probs = std::move(probs);
  return p;
}

PriorSpec PriorSpec::qpsk() {
  const double a = 1.0 / std::sqrt(2.0);
  return discrete({-a, a}, {0.5, 0.5});
}

PriorSpec PriorSpec::laplace_lasso(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("laplace_lasso: lambda must be >= 0");
  PriorSpec p;
  p.kind = PriorKind::LaplaceLasso;
  p.lambda = lambda;
  return p;
}

double PriorSpec::second_moment() const {
  switch (kind) {
    case PriorKind::BernoulliGaussian:
      return 1.0 + rho * mu * mu;
    case PriorKind::Discrete: {
      double s = 0.0;
      for (std::size_t k = 0; k < levels.size(); ++k) s += probs[k] * levels[k] * levels[k];
      return s;
    }
    case PriorKind::LaplaceLasso:
      throw UnsupportedPriorError("LaplaceLasso has no signal law");
  }
  return 0.0;
}

Eigen::MatrixXd gen_iid_gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_iid_gaussian: dimensions must be >= 1");
  RandomStream rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd H(m, n);
  // Column-major fill so the draw order matches Eigen's storage.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) H(i, j) = scale * rng.gaussian();
  }
  return H;
}

namespace {

// Haar-distributed orthonormal columns: QR of an IID Gaussian matrix with the
// R-diagonal sign fixed so the factor is unique.
Eigen::MatrixXd haar_columns(Eigen::Index rows, Eigen::Index cols, RandomStream rng) {
  Eigen::MatrixXd G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace

ConditionedFactors gen_conditioned_factors(Eigen::Index m, Eigen::Index n, double kappa,
                                           std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_conditioned: dimensions must be >= 1");
  if (m > n) throw std::invalid_argument("gen_conditioned: requires m <= n");
  if (!(kappa >= 1.0)) throw std::invalid_argument("gen_conditioned: kappa must be >= 1");
  if (kappa > 1.0 && m < 2) {
    throw std::invalid_argument("gen_conditioned: kappa > 1 needs m >= 2");
  }

  // Geometric singular values with sigma_1/sigma_m = kappa exactly, scaled so
  // sum sigma_i^2 = n.
  Eigen::VectorXd sigma(m);
  if (kappa == 1.0) {
    sigma.setConstant(std::sqrt(static_cast<double>(n) / static_cast<double>(m)));
  } else {
    const double step = std::pow(kappa, -1.0 / static_cast<double>(m - 1));
    double sum_sq = 0.0;
    double s = 1.0;
    for (Eigen::Index i = 0; i < m; ++i, s *= step) {
      sigma(i) = s;
      sum_sq += s * s;
    }
    sigma *= std::sqrt(static_cast<double>(n) / sum_sq);
  }

  RandomStream rng(seed);
  ConditionedFactors f;
  f.U = haar_columns(m, m, rng.substream("haar-left"));
  f.V = haar_columns(n, m, rng.substream("haar-right"));
  f.sigma = sigma;
  return f;
}

Eigen::MatrixXd gen_conditioned(Eigen::Index m, Eigen::Index n, double kappa,
                                std::uint64_t seed) {
  const ConditionedFactors f = gen_conditioned_factors(m, n, kappa, seed);
  return f.U * f.sigma.asDiagonal() * f.V.transpose();
}

Eigen::MatrixXd gen_matrix(const MatrixSpec& spec) { return gen_matrix(spec, spec.seed); }

Eigen::MatrixXd gen_matrix(const MatrixSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case MatrixKind::IidGaussian:
      return gen_iid_gaussian(spec.m, spec.n, seed);
    case MatrixKind::Conditioned:
      return gen_conditioned(spec.m, spec.n, spec.kappa, seed);
  }
  throw std::invalid_argument("gen_matrix: unknown kind");
}

Eigen::VectorXd sample_prior(const PriorSpec& prior, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_prior: n must be >= 1");
  if (!prior.samplable()) {
    throw UnsupportedPriorError("sample_prior: LaplaceLasso is not samplable");
  }
  RandomStream rng(seed);
  Eigen::VectorXd x(n);
  if (prior.kind == PriorKind::BernoulliGaussian) {
    const double nz_std = std::sqrt(1.0 / prior.rho);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = rng.uniform();
      x(i) = (u < prior.rho) ? prior.mu + nz_std * rng.gaussian() : 0.0;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      double u = rng.uniform();
      std::size_t k = 0;
      while (k + 1 < prior.levels.size() && u >= prior.probs[k]) {
        u -= prior.probs[k];
        ++k;
      }
      x(i) = prior.levels[k];
    }
  }
  return x;
}

ProblemInstance synthesize(const MatrixSpec& matrix_spec, const PriorSpec& prior,
                           double snr_db, std::uint64_t seed) {
  RandomStream rng(seed);
  ProblemInstance inst;
  inst.H = gen_matrix(matrix_spec, rng.substream("matrix").seed());
  inst.x = sample_prior(prior, matrix_spec.n, rng.substream("signal").seed());
  inst.sigma_w2 = std::pow(10.0, -snr_db / 10.0);
  inst.alpha = static_cast<double>(matrix_spec.m) / static_cast<double>(matrix_spec.n);

  RandomStream noise = rng.substream("noise");
  const double noise_std = std::sqrt(inst.sigma_w2);
  Eigen::VectorXd n(matrix_spec.m);
  for (Eigen::Index i = 0; i < matrix_spec.m; ++i) n(i) = noise_std * noise.gaussian();
  inst.y = inst.H * inst.x + n;
  return inst;
}

double nmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("nmse: length mismatch");
  }
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nmse: all-zero truth");
  return (estimate - truth).squaredNorm() / denom;
}

double to_db(double value) { return 10.0 * std::log10(std::max(value, 1e-30)); }

double nmse_db(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  return to_db(nmse(estimate, truth));
}

}  // namespace ampkit
