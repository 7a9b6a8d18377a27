#include "pmdkit/sdp.hpp"

#include "pmdkit/json_matrix.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <atomic>

namespace pmdkit::sdp {

namespace {

using RMat = Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::atomic<long long> g_optimal_solves{0};
std::atomic<long long> g_certificate_failures{0};

// --- complex <-> real boundary ---------------------------------------
//
// A Hermitian F embeds as the symmetric [[Re F, -Im F], [Im F, Re F]].
// The embedding is an algebra homomorphism, doubles traces, and
// preserves positive semidefiniteness, so with data matrices scaled by
// 1/2 the real program reproduces complex objective and constraint
// values exactly. Averaging a real solution block Y with J Y J^T,
// J = [[0,-1],[1,0]], projects it back onto embedded form without
// changing feasibility or objective, which is what complex_extract
// implements in closed form.

RMat real_embed_half(const Matrix& f) {
  const Eigen::Index n = f.rows();
  const RMat re = 0.5 * f.real();
  const RMat im = 0.5 * f.imag();
  RMat e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = re;
  e.topRightCorner(n, n) = -im;
  e.bottomLeftCorner(n, n) = im;
  e.bottomRightCorner(n, n) = re;
  return e;
}

Matrix complex_extract(const RMat& y) {
  const Eigen::Index n = y.rows() / 2;
  const RMat p =
      0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const RMat q =
      0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  Matrix x = p.cast<Complex>() + Complex(0.0, 1.0) * q.cast<Complex>();
  return 0.5 * (x + Matrix(x.adjoint()));
}

// --- internal real symmetric block problem ----------------------------

struct RealTerm {
  int block;
  RMat coeff;  // symmetric
};

struct RealConstraint {
  std::vector<RealTerm> terms;
  double rhs;
};

struct RealResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<RMat> x;
  RealVector y;
  int iterations = 0;
  std::string message;
  std::optional<RealVector> farkas;
};

std::vector<RMat> zero_blocks(const std::vector<int>& dims) {
  std::vector<RMat> out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(RMat::Zero(d, d));
  return out;
}

double block_dot(const std::vector<RMat>& a, const std::vector<RMat>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += (a[i].array() * b[i].array()).sum();
  }
  return s;
}

RealVector apply_a(const std::vector<RealConstraint>& cons,
                   const std::vector<RMat>& x) {
  RealVector v(cons.size());
  for (std::size_t k = 0; k < cons.size(); ++k) {
    double s = 0.0;
    for (const RealTerm& t : cons[k].terms) {
      s += (t.coeff.array() * x[t.block].array()).sum();
    }
    v(static_cast<Eigen::Index>(k)) = s;
  }
  return v;
}

std::vector<RMat> apply_at(const std::vector<RealConstraint>& cons,
                           const RealVector& y,
                           const std::vector<int>& dims) {
  std::vector<RMat> out = zero_blocks(dims);
  for (std::size_t k = 0; k < cons.size(); ++k) {
    const double yk = y(static_cast<Eigen::Index>(k));
    if (yk == 0.0) continue;
    for (const RealTerm& t : cons[k].terms) {
      out[t.block] += yk * t.coeff;
    }
  }
  return out;
}

// Largest step alpha with P + alpha D staying PSD; P must be PD.
double max_step(const std::vector<RMat>& p, const std::vector<RMat>& d) {
  double alpha = kInf;
  for (std::size_t b = 0; b < p.size(); ++b) {
    Eigen::LLT<RMat> llt(p[b]);
    if (llt.info() != Eigen::Success) return 0.0;
    const RMat w1 = llt.matrixL().solve(d[b]);
    const RMat w = llt.matrixL().solve(w1.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (w + w.transpose()),
                                           Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-14) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

double min_eigenvalue(const std::vector<RMat>& blocks) {
  double m = kInf;
  for (const RMat& b : blocks) {
    Eigen::SelfAdjointEigenSolver<RMat> es(b, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

std::vector<RMat> symmetrize(std::vector<RMat> blocks) {
  for (RMat& b : blocks) b = 0.5 * (b + b.transpose());
  return blocks;
}

// Primal-dual path following with the XZ direction and a Mehrotra
// predictor-corrector step, on
//   min <C,X>  s.t.  <A_k,X> = b_k,  X >= 0 (block diagonal).
// Constraints must be linearly independent (the caller filters).
RealResult solve_real(const std::vector<int>& dims,
                      const std::vector<RMat>& c,
                      const std::vector<RealConstraint>& cons,
                      const RealVector& b, const SolveOptions& opts) {
  const std::size_t n_blocks = dims.size();
  const int m = static_cast<int>(cons.size());
  int n_total = 0;
  for (int d : dims) n_total += d;

  // Constraints touching each block, for Schur assembly.
  std::vector<std::vector<std::pair<int, const RMat*>>> touching(n_blocks);
  for (int k = 0; k < m; ++k) {
    for (const RealTerm& t : cons[k].terms) {
      touching[t.block].push_back({k, &t.coeff});
    }
  }

  double norm_c = 0.0;
  for (const RMat& blk : c) {
    norm_c = std::max(norm_c, blk.cwiseAbs().maxCoeff());
  }
  double norm_a = 1.0;
  for (const auto& con : cons) {
    for (const RealTerm& t : con.terms) {
      norm_a = std::max(norm_a, t.coeff.cwiseAbs().maxCoeff());
    }
  }
  const double norm_b = (m > 0) ? b.cwiseAbs().maxCoeff() : 0.0;

  RealResult res;
  res.y = RealVector::Zero(m);

  std::vector<RMat> x, s;
  const double xi_p = 10.0 * std::max(1.0, norm_b);
  const double xi_d = 10.0 * std::max({1.0, norm_c, norm_a});
  for (int d : dims) {
    x.push_back(xi_p * RMat::Identity(d, d));
    s.push_back(xi_d * RMat::Identity(d, d));
  }

  const double dres_scale = 1.0 + norm_c;
  std::ostringstream diag;
  int stalls = 0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    res.iterations = iter;
    const double pobj = block_dot(c, x);
    const double dobj = (m > 0) ? b.dot(res.y) : 0.0;

    RealVector rp = b - apply_a(cons, x);
    std::vector<RMat> aty = apply_at(cons, res.y, dims);
    std::vector<RMat> rd(n_blocks);
    double dres = 0.0;
    for (std::size_t bb = 0; bb < n_blocks; ++bb) {
      rd[bb] = c[bb] - s[bb] - aty[bb];
      dres = std::max(dres, rd[bb].cwiseAbs().maxCoeff());
    }
    const double pres = (m > 0) ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double relgap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));

    if (pres <= opts.feas_tol && dres <= opts.feas_tol * dres_scale &&
        relgap <= opts.gap_tol) {
      res.status = SolveStatus::Optimal;
      res.x = x;
      return res;
    }

    // Farkas test for primal infeasibility: a dual ray y with
    // A^T(y) <= 0 and b.y > 0 certifies that no feasible X exists.
    if (m > 0) {
      const double bty = b.dot(res.y);
      if (bty > 1e-6) {
        RealVector ray = res.y / bty;
        std::vector<RMat> z = apply_at(cons, ray, dims);
        double lmax = -kInf;
        for (const RMat& blk : z) {
          Eigen::SelfAdjointEigenSolver<RMat> es(blk, Eigen::EigenvaluesOnly);
          lmax = std::max(lmax, es.eigenvalues().maxCoeff());
        }
        if (lmax <= opts.feas_tol) {
          res.status = SolveStatus::Infeasible;
          res.farkas = ray;
          res.x = x;
          res.message = "primal infeasible: dual improving ray found";
          return res;
        }
      }
    }

    if (pobj < -1e10 * std::max(1.0, norm_c) && pres <= opts.feas_tol * 10) {
      res.status = SolveStatus::Unbounded;
      res.x = x;
      res.message = "objective diverges below every bound";
      return res;
    }

    const double mu = block_dot(x, s) / n_total;
    if (!std::isfinite(mu) || mu > 1e18) {
      res.status = SolveStatus::NumericalFailure;
      res.x = x;
      res.message = "iterates diverged";
      return res;
    }

    // Factor S and form S^{-1}.
    std::vector<RMat> sinv(n_blocks);
    bool chol_ok = true;
    for (std::size_t bb = 0; bb < n_blocks; ++bb) {
      Eigen::LLT<RMat> llt(s[bb]);
      if (llt.info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      sinv[bb] = llt.solve(RMat::Identity(dims[bb], dims[bb]));
    }
    if (!chol_ok) {
      res.status = SolveStatus::NumericalFailure;
      res.x = x;
      res.message = "dual slack lost positive definiteness";
      return res;
    }

    // Schur complement M_ij = <A_i, sym(X A_j S^{-1})>.
    RMat schur = RMat::Zero(m, m);
    std::vector<std::vector<RMat>> vcache(n_blocks);
    for (std::size_t bb = 0; bb < n_blocks; ++bb) {
      const auto& touch = touching[bb];
      vcache[bb].resize(touch.size());
      for (std::size_t j = 0; j < touch.size(); ++j) {
        vcache[bb][j] = x[bb] * (*touch[j].second) * sinv[bb];
      }
      for (std::size_t i = 0; i < touch.size(); ++i) {
        for (std::size_t j = 0; j < touch.size(); ++j) {
          schur(touch[i].first, touch[j].first) +=
              (touch[i].second->array() * vcache[bb][j].transpose().array())
                  .sum();
        }
      }
    }
    schur = 0.5 * (schur + schur.transpose());

    Eigen::LDLT<RMat> schur_fact;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      RMat reg = schur;
      if (jitter > 0.0) reg += jitter * RMat::Identity(m, m);
      schur_fact.compute(reg);
      if (schur_fact.info() == Eigen::Success &&
          (m == 0 || schur_fact.isPositive())) {
        break;
      }
      jitter = (jitter == 0.0) ? 1e-13 * std::max(1.0, schur.norm()) : jitter * 100;
    }

    auto direction = [&](double nu, const std::vector<RMat>* corr_dx,
                         const std::vector<RMat>* corr_ds,
                         std::vector<RMat>& dx, std::vector<RMat>& ds,
                         RealVector& dy) {
      std::vector<RMat> base(n_blocks);
      for (std::size_t bb = 0; bb < n_blocks; ++bb) {
        base[bb] = nu * sinv[bb] - x[bb] - x[bb] * rd[bb] * sinv[bb];
        if (corr_dx != nullptr) {
          base[bb] -= (*corr_dx)[bb] * (*corr_ds)[bb] * sinv[bb];
        }
      }
      RealVector rhs = rp;
      for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (const RealTerm& t : cons[k].terms) {
          acc += (t.coeff.array() * base[t.block].transpose().array()).sum();
        }
        rhs(k) -= acc;
      }
      dy = (m > 0) ? RealVector(schur_fact.solve(rhs)) : RealVector();
      std::vector<RMat> atdy = apply_at(cons, dy, dims);
      ds.resize(n_blocks);
      dx.resize(n_blocks);
      for (std::size_t bb = 0; bb < n_blocks; ++bb) {
        ds[bb] = rd[bb] - atdy[bb];
        RMat raw = base[bb] + x[bb] * atdy[bb] * sinv[bb];
        dx[bb] = 0.5 * (raw + raw.transpose());
      }
    };

    // Predictor.
    std::vector<RMat> dx_aff, ds_aff;
    RealVector dy_aff;
    direction(0.0, nullptr, nullptr, dx_aff, ds_aff, dy_aff);
    const double ap_aff = std::min(1.0, max_step(x, dx_aff));
    const double ad_aff = std::min(1.0, max_step(s, ds_aff));
    double mu_aff = 0.0;
    for (std::size_t bb = 0; bb < n_blocks; ++bb) {
      mu_aff += ((x[bb] + ap_aff * dx_aff[bb]).array() *
                 (s[bb] + ad_aff * ds_aff[bb]).array())
                    .sum();
    }
    mu_aff /= n_total;
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // Corrector.
    std::vector<RMat> dx, ds;
    RealVector dy;
    direction(sigma * mu, &dx_aff, &ds_aff, dx, ds, dy);

    const double tau = (iter < 5 || relgap > 1e-3) ? 0.95 : 0.98;
    double ap = std::min(1.0, tau * max_step(x, dx));
    double ad = std::min(1.0, tau * max_step(s, ds));

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) {
        diag << "step lengths collapsed (mu=" << mu << ", pres=" << pres
             << ", dres=" << dres << ", relgap=" << relgap << ")";
        res.status = SolveStatus::NumericalFailure;
        res.x = x;
        res.message = diag.str();
        return res;
      }
    } else {
      stalls = 0;
    }

    for (std::size_t bb = 0; bb < n_blocks; ++bb) {
      x[bb] += ap * dx[bb];
      s[bb] += ad * ds[bb];
    }
    x = symmetrize(std::move(x));
    s = symmetrize(std::move(s));
    if (m > 0) res.y += ad * dy;
  }

  {
    // Recompute closing diagnostics for the failure message.
    const double pobj = block_dot(c, x);
    const double dobj = (m > 0) ? b.dot(res.y) : 0.0;
    const RealVector rp = b - apply_a(cons, x);
    diag << "max iterations (" << opts.max_iter << ") reached: relgap="
         << std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj))
         << ", pres=" << ((m > 0) ? rp.cwiseAbs().maxCoeff() : 0.0);
  }
  res.status = SolveStatus::NumericalFailure;
  res.x = x;
  res.message = diag.str();
  res.iterations = opts.max_iter;
  return res;
}

// Accumulate a functional into one dense Hermitian coefficient per block.
std::vector<Matrix> accumulate_terms(const SdpProblem& problem,
                                     const LinearFunctional& f, double scale) {
  std::vector<Matrix> out;
  out.reserve(problem.blocks.size());
  for (const BlockSpec& blk : problem.blocks) {
    out.push_back(Matrix::Zero(blk.dim, blk.dim));
  }
  for (const LinearTerm& t : f) {
    out[static_cast<std::size_t>(t.block)] += scale * t.coeff;
  }
  return out;
}

double eval_functional(const LinearFunctional& f,
                       const std::vector<Matrix>& blocks) {
  double v = 0.0;
  for (const LinearTerm& t : f) {
    v += (t.coeff * blocks[static_cast<std::size_t>(t.block)]).trace().real();
  }
  return v;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
    case SolveStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

void validate_problem(const SdpProblem& problem) {
  if (problem.blocks.empty()) {
    throw InvalidInputError("structurally empty problem: no variable blocks");
  }
  for (const BlockSpec& blk : problem.blocks) {
    if (blk.dim <= 0) {
      throw DimensionError("SDP block '" + blk.name +
                           "' must have positive dimension");
    }
  }
  auto check_functional = [&](const LinearFunctional& f, const char* where) {
    for (const LinearTerm& t : f) {
      if (t.block < 0 ||
          t.block >= static_cast<int>(problem.blocks.size())) {
        throw InvalidInputError(std::string(where) +
                                ": term references undeclared block");
      }
      const int d = problem.blocks[static_cast<std::size_t>(t.block)].dim;
      if (t.coeff.rows() != d || t.coeff.cols() != d) {
        throw DimensionError(std::string(where) +
                             ": coefficient dimension mismatch");
      }
      require_hermitian(t.coeff, kHermTol, "SDP coefficient");
    }
  };
  check_functional(problem.objective, "objective");
  for (const Constraint& con : problem.constraints) {
    check_functional(con.lhs, "constraint");
  }
}

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) {
  validate_problem(problem);

  const int m = static_cast<int>(problem.constraints.size());
  const double sense_sign = (problem.sense == Sense::Maximize) ? -1.0 : 1.0;

  std::vector<int> real_dims;
  real_dims.reserve(problem.blocks.size());
  for (const BlockSpec& blk : problem.blocks) real_dims.push_back(2 * blk.dim);

  const std::vector<Matrix> c_complex =
      accumulate_terms(problem, problem.objective, sense_sign);
  std::vector<RMat> c_real;
  c_real.reserve(c_complex.size());
  for (const Matrix& blk : c_complex) c_real.push_back(real_embed_half(blk));

  std::vector<RealConstraint> cons(m);
  RealVector b(m);
  for (int k = 0; k < m; ++k) {
    const std::vector<Matrix> acc =
        accumulate_terms(problem, problem.constraints[k].lhs, 1.0);
    for (std::size_t bb = 0; bb < acc.size(); ++bb) {
      if (acc[bb].cwiseAbs().maxCoeff() > 0.0) {
        cons[k].terms.push_back(
            {static_cast<int>(bb), real_embed_half(acc[bb])});
      }
    }
    cons[k].rhs = problem.constraints[k].rhs;
    b(k) = problem.constraints[k].rhs;
  }

  // Rank-filter the equality constraints: redundant-but-consistent rows
  // are dropped (their multipliers report as zero); an inconsistent row
  // yields an exact Farkas ray.
  std::vector<int> kept, dropped;
  {
    Eigen::Index vec_len = 0;
    for (int d : real_dims) vec_len += static_cast<Eigen::Index>(d) * d;
    RMat at = RMat::Zero(vec_len, m);
    for (int k = 0; k < m; ++k) {
      Eigen::Index off = 0;
      for (std::size_t bb = 0; bb < real_dims.size(); ++bb) {
        const Eigen::Index sz =
            static_cast<Eigen::Index>(real_dims[bb]) * real_dims[bb];
        for (const RealTerm& t : cons[k].terms) {
          if (t.block == static_cast<int>(bb)) {
            at.block(off, k, sz, 1) =
                Eigen::Map<const RealVector>(t.coeff.data(), sz);
          }
        }
        off += sz;
      }
    }
    Eigen::ColPivHouseholderQR<RMat> qr(at);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    std::vector<char> is_kept(m, 0);
    for (int i = 0; i < rank; ++i) {
      is_kept[qr.colsPermutation().indices()(i)] = 1;
    }
    for (int k = 0; k < m; ++k) {
      (is_kept[k] ? kept : dropped).push_back(k);
    }
    if (!dropped.empty()) {
      RMat at_kept(vec_len, kept.size());
      RealVector b_kept(kept.size());
      for (std::size_t i = 0; i < kept.size(); ++i) {
        at_kept.col(static_cast<Eigen::Index>(i)) = at.col(kept[i]);
        b_kept(static_cast<Eigen::Index>(i)) = b(kept[i]);
      }
      Eigen::ColPivHouseholderQR<RMat> qr_kept(at_kept);
      for (int j : dropped) {
        const RealVector coeffs = qr_kept.solve(at.col(j));
        const double defect = std::abs(b(j) - coeffs.dot(b_kept));
        if (defect > opts.feas_tol * std::max(1.0, b.cwiseAbs().maxCoeff())) {
          SdpSolution sol;
          sol.status = SolveStatus::Infeasible;
          RealVector ray = RealVector::Zero(m);
          ray(j) = 1.0;
          for (std::size_t i = 0; i < kept.size(); ++i) {
            ray(kept[i]) = -coeffs(static_cast<Eigen::Index>(i));
          }
          ray /= ray.dot(b);
          sol.farkas_ray = ray;
          sol.multipliers = RealVector::Zero(m);
          sol.message = "equality constraints are inconsistent";
          sol.blocks.reserve(problem.blocks.size());
          for (const BlockSpec& blk : problem.blocks) {
            sol.blocks.push_back(Matrix::Zero(blk.dim, blk.dim));
          }
          return sol;
        }
      }
    }
  }

  std::vector<RealConstraint> cons_kept;
  RealVector b_kept(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    cons_kept.push_back(cons[kept[i]]);
    b_kept(static_cast<Eigen::Index>(i)) = b(kept[i]);
  }

  RealResult real = solve_real(real_dims, c_real, cons_kept, b_kept, opts);

  SdpSolution sol;
  sol.status = real.status;
  sol.iterations = real.iterations;
  sol.message = real.message;
  sol.blocks.reserve(problem.blocks.size());
  for (const RMat& blk : real.x) sol.blocks.push_back(complex_extract(blk));

  RealVector y_full = RealVector::Zero(m);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (real.y.size() > 0) y_full(kept[i]) = real.y(static_cast<Eigen::Index>(i));
  }
  sol.multipliers = sense_sign * y_full;

  if (real.farkas.has_value()) {
    RealVector ray = RealVector::Zero(m);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      ray(kept[i]) = (*real.farkas)(static_cast<Eigen::Index>(i));
    }
    sol.farkas_ray = ray;
  }

  sol.primal_value = eval_functional(problem.objective, sol.blocks);
  sol.dual_value = sol.multipliers.dot(b);
  sol.gap = std::abs(sol.primal_value - sol.dual_value) /
            std::max(1.0, std::abs(sol.primal_value));
  sol.max_residual = 0.0;
  for (int k = 0; k < m; ++k) {
    sol.max_residual =
        std::max(sol.max_residual,
                 std::abs(eval_functional(problem.constraints[k].lhs,
                                          sol.blocks) -
                          problem.constraints[k].rhs));
  }
  sol.min_eigenvalue = kInf;
  for (const Matrix& blk : sol.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
    sol.min_eigenvalue = std::min(sol.min_eigenvalue,
                                  es.eigenvalues().minCoeff());
  }

  // The Optimal label is a contract; enforce it on the extracted blocks.
  if (sol.status == SolveStatus::Optimal) {
    if (sol.gap > opts.gap_tol || sol.max_residual > opts.feas_tol ||
        sol.min_eigenvalue < -opts.feas_tol) {
      sol.status = SolveStatus::NumericalFailure;
      std::ostringstream os;
      os << "extracted solution violates the optimality contract: gap="
         << sol.gap << ", residual=" << sol.max_residual
         << ", min eigenvalue=" << sol.min_eigenvalue;
      sol.message = os.str();
    }
  }
  if (sol.status == SolveStatus::Optimal) {
    g_optimal_solves.fetch_add(1, std::memory_order_relaxed);
    const CertificateReport audit = check_certificate(problem, sol, opts);
    if (!audit.pass) {
      g_certificate_failures.fetch_add(1, std::memory_order_relaxed);
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "post-solve certificate audit failed: " +
                    audit.violations.front();
    }
  }
  return sol;
}

CertificateReport check_certificate(const SdpProblem& problem,
                                    const SdpSolution& solution,
                                    const SolveOptions& opts) {
  validate_problem(problem);
  CertificateReport report;
  if (solution.blocks.size() != problem.blocks.size()) {
    throw DimensionError("check_certificate: block count mismatch");
  }
  for (std::size_t bb = 0; bb < problem.blocks.size(); ++bb) {
    const int d = problem.blocks[bb].dim;
    if (solution.blocks[bb].rows() != d || solution.blocks[bb].cols() != d) {
      throw DimensionError("check_certificate: block shape mismatch");
    }
  }
  if (solution.multipliers.size() !=
      static_cast<Eigen::Index>(problem.constraints.size())) {
    throw DimensionError("check_certificate: multiplier count mismatch");
  }

  const double primal = eval_functional(problem.objective, solution.blocks);
  report.objective_error = std::abs(primal - solution.primal_value);

  RealVector rhs(problem.constraints.size());
  for (std::size_t k = 0; k < problem.constraints.size(); ++k) {
    const double v =
        eval_functional(problem.constraints[k].lhs, solution.blocks);
    rhs(static_cast<Eigen::Index>(k)) = problem.constraints[k].rhs;
    report.max_residual =
        std::max(report.max_residual, std::abs(v - problem.constraints[k].rhs));
  }

  report.min_primal_eigenvalue = kInf;
  for (const Matrix& blk : solution.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
    report.min_primal_eigenvalue =
        std::min(report.min_primal_eigenvalue, es.eigenvalues().minCoeff());
  }

  // Dual slack in minimization form: Z = C' - sum_k y'_k A_k >= 0.
  const double sense_sign = (problem.sense == Sense::Maximize) ? -1.0 : 1.0;
  std::vector<Matrix> z = accumulate_terms(problem, problem.objective,
                                           sense_sign);
  for (std::size_t k = 0; k < problem.constraints.size(); ++k) {
    const double yk =
        sense_sign * solution.multipliers(static_cast<Eigen::Index>(k));
    if (yk == 0.0) continue;
    for (const LinearTerm& t : problem.constraints[k].lhs) {
      z[static_cast<std::size_t>(t.block)] -= yk * t.coeff;
    }
  }
  report.min_dual_slack_eigenvalue = kInf;
  for (const Matrix& blk : z) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
    report.min_dual_slack_eigenvalue =
        std::min(report.min_dual_slack_eigenvalue, es.eigenvalues().minCoeff());
  }

  const double dual = solution.multipliers.dot(rhs);
  report.gap = std::abs(primal - dual) / std::max(1.0, std::abs(primal));

  const double feas = opts.feas_tol;
  auto flag = [&](bool bad, const std::string& text, double magnitude) {
    if (bad) {
      std::ostringstream os;
      os << text << " (magnitude " << magnitude << ")";
      report.violations.push_back(os.str());
    }
  };
  flag(report.objective_error > 10 * feas * std::max(1.0, std::abs(primal)),
       "reported objective differs from recomputed value",
       report.objective_error);
  flag(report.max_residual > feas, "equality constraint violated",
       report.max_residual);
  flag(report.min_primal_eigenvalue < -feas, "primal block not PSD",
       report.min_primal_eigenvalue);
  flag(report.min_dual_slack_eigenvalue < -10 * feas,
       "dual slack not PSD", report.min_dual_slack_eigenvalue);
  flag(report.gap > opts.gap_tol * 10, "duality gap exceeds tolerance",
       report.gap);
  report.pass = report.violations.empty();
  return report;
}

std::string problem_to_json(const SdpProblem& problem) {
  Json j;
  j["sense"] = problem.sense == Sense::Maximize ? "maximize" : "minimize";
  j["blocks"] = Json::array();
  for (const BlockSpec& blk : problem.blocks) {
    j["blocks"].push_back(Json{{"name", blk.name}, {"dim", blk.dim}});
  }
  auto functional_json = [](const LinearFunctional& f) {
    Json arr = Json::array();
    for (const LinearTerm& t : f) {
      arr.push_back(Json{{"block", t.block}, {"coeff", matrix_to_json(t.coeff)}});
    }
    return arr;
  };
  j["objective"] = functional_json(problem.objective);
  j["constraints"] = Json::array();
  for (const Constraint& con : problem.constraints) {
    j["constraints"].push_back(
        Json{{"terms", functional_json(con.lhs)}, {"rhs", con.rhs}});
  }
  return j.dump(2);
}

AuditStats audit_stats() {
  return AuditStats{g_optimal_solves.load(), g_certificate_failures.load()};
}

void reset_audit_stats() {
  g_optimal_solves.store(0);
  g_certificate_failures.store(0);
}

SdpProblem problem_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  SdpProblem problem;
  problem.sense = (j.at("sense").get<std::string>() == "maximize")
                      ? Sense::Maximize
                      : Sense::Minimize;
  for (const Json& blk : j.at("blocks")) {
    problem.blocks.push_back(
        BlockSpec{blk.at("name").get<std::string>(), blk.at("dim").get<int>()});
  }
  auto functional_from = [](const Json& arr) {
    LinearFunctional f;
    for (const Json& t : arr) {
      f.push_back(LinearTerm{t.at("block").get<int>(),
                             matrix_from_json(t.at("coeff"))});
    }
    return f;
  };
  problem.objective = functional_from(j.at("objective"));
  for (const Json& con : j.at("constraints")) {
    problem.constraints.push_back(Constraint{functional_from(con.at("terms")),
                                             con.at("rhs").get<double>()});
  }
  validate_problem(problem);
  return problem;
}

}  // namespace pmdkit::sdp
