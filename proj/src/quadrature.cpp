#include "ampkit/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "ampkit/denoise.hpp"

namespace ampkit {

namespace {

double simpson_estimate(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double simpson_rec(const F& f, double a, double fa, double m, double fm, double b,
                   double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_estimate(a, fa, flm, m, fm);
  const double right = simpson_estimate(m, fm, frm, b, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive(const F& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  return simpson_rec(f, a, fa, m, fm, b, fb, simpson_estimate(a, fa, fm, b, fb), tol, 40);
}

// Locations in r where the posterior flips between prior components; the
// posterior variance has a bump of width `width` there.
struct Boundary {
  double center;
  double width;
};

std::vector<Boundary> posterior_boundaries(const PriorSpec& prior, double tau2) {
  std::vector<Boundary> out;
  if (prior.kind == PriorKind::BernoulliGaussian) {
    if (prior.rho >= 1.0) return out;
    // Spike/slab log-odds cross zero at r_b (mu = 0 symmetric case is the
    // common one; for mu != 0 the quadratic in r is solved directly).
    const double s2 = 1.0 / prior.rho + tau2;
    const double a = 0.5 * (1.0 / tau2 - 1.0 / s2);
    const double b = prior.mu / s2;
    const double c =
        std::log(prior.rho / (1.0 - prior.rho)) + 0.5 * std::log(tau2 / s2);
    // a r^2 + b r + c = 0
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0 || a == 0.0) return out;
    for (double sign : {-1.0, 1.0}) {
      const double rb = (-b + sign * std::sqrt(disc)) / (2.0 * a);
      const double slope = std::abs(2.0 * a * rb + b);
      const double width = (slope > 0.0) ? 8.0 / slope : std::sqrt(tau2);
      out.push_back({rb, std::min(width, 4.0 * std::sqrt(tau2) + 1e-3)});
    }
  } else if (prior.kind == PriorKind::Discrete) {
    std::vector<double> levels = prior.levels;
    std::sort(levels.begin(), levels.end());
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
      const double gap = levels[k + 1] - levels[k];
      out.push_back({0.5 * (levels[k] + levels[k + 1]), 8.0 * tau2 / gap});
    }
  }
  return out;
}

}  // namespace

double prior_mmse(const PriorSpec& prior, double tau2, const QuadratureCfg& cfg) {
  if (!(tau2 > 0.0)) throw std::invalid_argument("prior_mmse: tau2 must be > 0");

  struct Component {
    double weight, center, spread;
  };
  std::vector<Component> comps;
  if (prior.kind == PriorKind::BernoulliGaussian) {
    if (prior.rho < 1.0) comps.push_back({1.0 - prior.rho, 0.0, std::sqrt(tau2)});
    comps.push_back({prior.rho, prior.mu, std::sqrt(1.0 / prior.rho + tau2)});
  } else if (prior.kind == PriorKind::Discrete) {
    for (std::size_t k = 0; k < prior.levels.size(); ++k) {
      comps.push_back({prior.probs[k], prior.levels[k], std::sqrt(tau2)});
    }
  } else {
    throw UnsupportedPriorError("prior_mmse: LaplaceLasso has no signal law");
  }

  const std::vector<Boundary> boundaries = posterior_boundaries(prior, tau2);
  const double inv_norm = 1.0 / std::sqrt(2.0 * M_PI);

  double mmse = 0.0;
  for (const auto& c : comps) {
    const double lo = c.center - 12.0 * c.spread;
    const double hi = c.center + 12.0 * c.spread;

    // Panel edges: coarse grid plus refinement around each decision boundary
    // so narrow variance bumps cannot be skipped.
    std::vector<double> edges;
    for (int k = 0; k <= cfg.panels; ++k) {
      edges.push_back(lo + (hi - lo) * k / cfg.panels);
    }
    for (const Boundary& b : boundaries) {
      for (double e : {b.center - 4.0 * b.width, b.center - b.width, b.center,
                       b.center + b.width, b.center + 4.0 * b.width}) {
        if (e > lo && e < hi) edges.push_back(e);
      }
    }
    std::sort(edges.begin(), edges.end());

    auto integrand = [&](double r) {
      const double z = (r - c.center) / c.spread;
      const double density = inv_norm * std::exp(-0.5 * z * z) / c.spread;
      return density * scalar_posterior(prior, r, tau2).var;
    };
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      if (edges[k + 1] - edges[k] < 1e-300) continue;
      acc += adaptive(integrand, edges[k], edges[k + 1], cfg.tol);
    }
    mmse += c.weight * acc;
  }
  return mmse;
}

}  // namespace ampkit
