#include "pmdkit/simplex.hpp"

#include <Eigen/LU>

#include <limits>
#include <vector>

namespace pmdkit::detail {

LpFeasibilityResult lp_feasible(const Eigen::MatrixXd& a_in,
                                const RealVector& b_in, double tol) {
  const int m = static_cast<int>(a_in.rows());
  const int n = static_cast<int>(a_in.cols());
  Eigen::MatrixXd a = a_in;
  RealVector b = b_in;
  std::vector<double> row_sign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      a.row(i) *= -1.0;
      b(i) *= -1.0;
      row_sign[i] = -1.0;
    }
  }

  // columns [0, n) structural with cost 0, [n, n+m) artificial with cost 1
  auto column = [&](int j) -> RealVector {
    if (j < n) return a.col(j);
    RealVector e = RealVector::Zero(m);
    e(j - n) = 1.0;
    return e;
  };
  auto cost = [&](int j) { return j < n ? 0.0 : 1.0; };

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const double pivot_tol = 1e-11;
  const long long iter_cap = 20000LL + 20LL * (n + m);

  Eigen::MatrixXd bmat(m, m);
  RealVector xb, y;
  for (long long iter = 0; iter < iter_cap; ++iter) {
    for (int i = 0; i < m; ++i) bmat.col(i) = column(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    xb = lu.solve(b);
    RealVector cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(basis[i]);
    y = lu.transpose().solve(cb);

    // Bland: the lowest-index column with a negative reduced cost enters
    int entering = -1;
    for (int j = 0; j < n + m; ++j) {
      bool in_basis = false;
      for (int i = 0; i < m; ++i) {
        if (basis[i] == j) {
          in_basis = true;
          break;
        }
      }
      if (in_basis) continue;
      const double reduced = cost(j) - y.dot(column(j));
      if (reduced < -pivot_tol) {
        entering = j;
        break;
      }
    }

    if (entering < 0) {
      const double objective = cb.dot(xb);
      LpFeasibilityResult result;
      if (objective <= tol * std::max(1.0, b.cwiseAbs().maxCoeff())) {
        result.feasible = true;
        result.solution = RealVector::Zero(n);
        for (int i = 0; i < m; ++i) {
          if (basis[i] < n) result.solution(basis[i]) = std::max(0.0, xb(i));
        }
      } else {
        result.feasible = false;
        RealVector ray(m);
        for (int i = 0; i < m; ++i) ray(i) = row_sign[i] * y(i);
        result.farkas = ray / objective;  // so that farkas . b_in = 1
      }
      return result;
    }

    const RealVector d = lu.solve(column(entering));
    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (d(i) > pivot_tol) {
        const double ratio = xb(i) / d(i);
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 &&
             (leaving < 0 || basis[i] < basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) {
      throw NumericalError(
          "phase-1 simplex found an unbounded direction; inputs are "
          "ill-conditioned");
    }
    basis[leaving] = entering;
  }
  throw NumericalError("phase-1 simplex exceeded its iteration cap");
}

}  // namespace pmdkit::detail
