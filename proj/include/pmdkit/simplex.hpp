#ifndef PMDKIT_SIMPLEX_HPP
#define PMDKIT_SIMPLEX_HPP

#include "pmdkit/operators.hpp"

#include <Eigen/Dense>

// Dense phase-1 simplex for linear feasibility with exact certificates:
// either a point z >= 0 with A z = b, or a Farkas ray y with
// y^T A <= 0 (componentwise) and y^T b = 1. Bland's rule, so it
// terminates on degenerate instances.

namespace pmdkit::detail {

struct LpFeasibilityResult {
  bool feasible = false;
  RealVector solution;  // z, when feasible
  RealVector farkas;    // y, when infeasible
};

LpFeasibilityResult lp_feasible(const Eigen::MatrixXd& a, const RealVector& b,
                                double tol = 1e-9);

}  // namespace pmdkit::detail

#endif  // PMDKIT_SIMPLEX_HPP
