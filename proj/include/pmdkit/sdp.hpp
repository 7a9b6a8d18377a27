#ifndef PMDKIT_SDP_HPP
#define PMDKIT_SDP_HPP

#include "pmdkit/operators.hpp"

#include <optional>
#include <string>
#include <vector>

// Self-contained dense semidefinite programming over complex Hermitian
// PSD variable blocks:
//
//   minimize / maximize   sum_b <F_b, X_b>
//   subject to            sum_b <A_{k,b}, X_b> = rhs_k   (k = 1..m)
//                         X_b >= 0                        (Hermitian PSD)
//
// with real-linear functionals given by Hermitian coefficient blocks
// (<A, X> = Tr(A X), real for Hermitian pairs).
//
// The solver is a primal-dual path-following interior point method with
// a Mehrotra predictor-corrector step. Complex Hermitian blocks are
// embedded as real symmetric blocks of doubled dimension at the solver
// boundary; the embedding and its inverse live only in this module.
//
// Solutions carry a duality-gap certificate; `check_certificate`
// re-derives every reported quantity from the raw blocks.

namespace pmdkit::sdp {

enum class Sense { Minimize, Maximize };

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(SolveStatus status);

struct BlockSpec {
  std::string name;
  int dim = 0;
};

/// One summand <coeff, X_block> of a real-linear functional.
struct LinearTerm {
  int block = 0;
  Matrix coeff;  // Hermitian, matching the block dimension
};

using LinearFunctional = std::vector<LinearTerm>;

struct Constraint {
  LinearFunctional lhs;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<BlockSpec> blocks;
  LinearFunctional objective;
  std::vector<Constraint> constraints;
  Sense sense = Sense::Minimize;
};

/// Throws InvalidInputError / DimensionError unless all functionals
/// reference declared blocks with Hermitian coefficients of the right
/// dimension.
void validate_problem(const SdpProblem& problem);

struct SolveOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<Matrix> blocks;   // primal blocks, one per BlockSpec
  RealVector multipliers;       // dual multiplier per equality constraint
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;             // |primal - dual| / max(1, |primal|)
  double max_residual = 0.0;    // max_k |<A_k, X> - rhs_k|
  double min_eigenvalue = 0.0;  // over all primal blocks
  int iterations = 0;
  std::string message;
  // Farkas certificate of primal infeasibility: multipliers y with
  // sum_k y_k A_k <= feas_tol and sum_k y_k rhs_k = 1 (after the sense
  // normalization to a minimization).
  std::optional<RealVector> farkas_ray;
};

/// Deterministic for identical inputs and options.
SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts = {});

struct CertificateReport {
  bool pass = false;
  double objective_error = 0.0;    // |reported - recomputed primal value|
  double max_residual = 0.0;       // recomputed from blocks
  double min_primal_eigenvalue = 0.0;
  double min_dual_slack_eigenvalue = 0.0;  // of C - A^T(y), sense-normalized
  double gap = 0.0;                // recomputed
  std::vector<std::string> violations;
};

/// Independent re-evaluation of a solution labeled Optimal: objective,
/// residuals, eigenvalue floors of both primal blocks and the dual slack,
/// and the duality gap, all recomputed from the raw blocks/multipliers.
CertificateReport check_certificate(const SdpProblem& problem,
                                    const SdpSolution& solution,
                                    const SolveOptions& opts = {});

/// Debug dump/restore of a problem (block dims, dense coefficients, rhs).
std::string problem_to_json(const SdpProblem& problem);
SdpProblem problem_from_json(const std::string& text);

/// Every solve that reports Optimal is immediately re-audited through
/// check_certificate; these process-wide counters record the outcomes so
/// a test suite can assert that no audited solve slipped through.
struct AuditStats {
  long long optimal_solves = 0;
  long long certificate_failures = 0;
};

AuditStats audit_stats();
void reset_audit_stats();

}  // namespace pmdkit::sdp

#endif  // PMDKIT_SDP_HPP
