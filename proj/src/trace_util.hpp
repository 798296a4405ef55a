#pragma once

#include <cmath>

#include "ampkit/solvers.hpp"

namespace ampkit::detail {

inline constexpr double kDivergedNmse = 1e6;

// Shared per-iteration bookkeeping: NMSE against the ground truth,
// divergence detection, and the 3-strike relative-change stopping rule.
struct StopState {
  double stop_tol = 0.0;
  int streak = 0;
  double last_nmse = std::numeric_limits<double>::quiet_NaN();
};

// Appends one row to the trace; returns false when the solver should stop
// (trace.status is then set to Converged or Diverged).
inline bool record_iteration(SolverTrace& trace, const ProblemInstance& inst,
                             StopState& stop, Eigen::VectorXd estimate,
                             Eigen::VectorXd extrinsic, Eigen::VectorXd input,
                             Eigen::VectorXd residual, double tau2, double v_hat) {
  const bool finite = estimate.allFinite();
  const double err = finite ? nmse(estimate, inst.x) : std::numeric_limits<double>::infinity();

  trace.estimates.push_back(std::move(estimate));
  if (extrinsic.size() > 0) trace.extrinsics.push_back(std::move(extrinsic));
  if (input.size() > 0) trace.inputs.push_back(std::move(input));
  if (residual.size() > 0) trace.residuals.push_back(std::move(residual));
  trace.tau2.push_back(tau2);
  trace.v_hat.push_back(v_hat);
  trace.nmse_db.push_back(to_db(err));

  if (!finite || !std::isfinite(err) || err > kDivergedNmse) {
    trace.status = SolverStatus::Diverged;
    return false;
  }
  if (stop.stop_tol > 0.0 && std::isfinite(stop.last_nmse) && stop.last_nmse > 0.0) {
    const double rel = std::abs(err - stop.last_nmse) / stop.last_nmse;
    stop.streak = (rel < stop.stop_tol) ? stop.streak + 1 : 0;
    if (stop.streak >= 3) {
      trace.status = SolverStatus::Converged;
      stop.last_nmse = err;
      return false;
    }
  }
  stop.last_nmse = err;
  return true;
}

}  // namespace ampkit::detail
