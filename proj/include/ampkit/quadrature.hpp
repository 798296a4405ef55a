#pragma once

#include <vector>

#include "ampkit/model.hpp"

namespace ampkit {

// Controls the deterministic quadrature behind the SE expectations.
struct QuadratureCfg {
  int panels = 32;      // coarse panels per mixture component
  double tol = 1e-13;   // absolute adaptive-Simpson tolerance per panel
};

// E[Var(X | X + sqrt(tau2) Z)] under the prior's scalar Gaussian channel.
// The marginal of R is an exact finite mixture of Gaussians; each component
// is integrated with adaptive Simpson on a panel grid refined around the
// posterior decision boundaries (where the posterior variance has a narrow
// bump that coarse fixed rules miss). Deterministic; no Monte Carlo.
double prior_mmse(const PriorSpec& prior, double tau2, const QuadratureCfg& cfg = {});

}  // namespace ampkit
