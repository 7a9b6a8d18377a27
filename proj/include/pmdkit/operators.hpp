#ifndef PMDKIT_OPERATORS_HPP
#define PMDKIT_OPERATORS_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Complex Hermitian linear algebra used by every other component:
// validation, spectra, PSD checks, trace pairings, and completely
// positive maps in Choi form.
//
// All operators are dense Eigen::MatrixXcd at desk scale (dim <~ 30).
// Types are immutable after construction and every function is pure,
// so everything here is safe to share across threads.

namespace pmdkit {

using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

// Absolute tolerances on unit-scale operators.
inline constexpr double kHermTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;

/// Thrown when operator/alphabet dimensions do not line up.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an input violates a structural invariant (non-Hermitian
/// entries, non-PSD Choi block, malformed tables, ...).
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine cannot reach its tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Largest deviation |A - A^dagger| over entries.
double hermiticity_violation(const Matrix& a);

bool is_hermitian(const Matrix& a, double tol = kHermTol);

/// Throws InvalidInputError (with the violating magnitude in the message)
/// if `a` is not Hermitian within `tol`.
void require_hermitian(const Matrix& a, double tol = kHermTol,
                       const std::string& what = "operator");

/// Result of a positive-semidefiniteness probe.
struct PsdReport {
  double min_eigenvalue = 0.0;
  bool is_psd = false;  // min_eigenvalue >= -tol
};

PsdReport psd_check(const Matrix& a, double tol = kPsdTol);

struct EigResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns match eigenvalues
};

/// Spectral decomposition of a Hermitian operator, a = V diag(w) V^dagger.
EigResult eig_hermitian(const Matrix& a);

/// Tr(a b) for Hermitian a, b of equal dimension. The product trace is
/// real for Hermitian pairs; an imaginary residue beyond 1e-12 (relative
/// to the magnitude) is rejected as a non-Hermitian input.
double trace_pair(const Matrix& a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);

/// Partial trace over the first (dim_a) factor of a (dim_a*dim_b) square
/// operator; result acts on the second factor.
Matrix partial_trace_first(const Matrix& m, int dim_a, int dim_b);

/// Partial trace over the second factor; result acts on the first.
Matrix partial_trace_second(const Matrix& m, int dim_a, int dim_b);

/// Orthonormal Hermitian basis {E_k} of the d x d Hermitian operators:
/// d diagonal units followed by (real, imag) off-diagonal pairs scaled by
/// 1/sqrt(2). Tr(E_j E_k) = delta_jk, so coordinates are Tr(E_k A).
std::vector<Matrix> hermitian_basis(int dim);

/// Coordinates of `a` in hermitian_basis(dim): v_k = Tr(E_k a).
RealVector hermitian_coords(const Matrix& a);

/// Inverse of hermitian_coords.
Matrix from_hermitian_coords(const RealVector& v, int dim);

// ---------------------------------------------------------------------
// Completely positive maps in Choi form.
//
// Convention: for a map E from dim `in_dim` to dim `out_dim`,
//   choi = sum_{ij} |i><j|_in  (x)  E(|i><j|)_out,
// a PSD (in_dim*out_dim) x (in_dim*out_dim) operator. Then
//   E(rho)    = Tr_in[(rho^T (x) 1) choi],
//   E^dag(Y)  = (Tr_out[(1 (x) Y) choi])^T,
// and the family {E_i} is trace preserving in sum iff
//   Tr_out[sum_i choi_i] = 1_in.
// ---------------------------------------------------------------------

struct ChoiMap {
  int in_dim = 0;
  int out_dim = 0;
  Matrix choi;

  ChoiMap() = default;
  ChoiMap(int in_dim_, int out_dim_, Matrix choi_);
};

/// Throws unless the Choi block is Hermitian and PSD within `tol`.
void require_cp(const ChoiMap& map, double tol = kPsdTol);

/// E(state); `state` must act on the input space.
Matrix apply_choi(const ChoiMap& map, const Matrix& state);

/// Trace-dual map E^dag(effect); `effect` must act on the output space.
Matrix adjoint_apply(const ChoiMap& map, const Matrix& effect);

/// max |Tr_out(choi) - 1_in| entry for a single map (0 for channels).
double trace_preservation_defect(const std::vector<ChoiMap>& instrument);

ChoiMap identity_choi(int dim);

/// E(rho) = Tr(rho) 1/out_dim.
ChoiMap depolarizing_choi(int in_dim, int out_dim);

/// Choi matrix of rho -> K rho K^dagger for a single Kraus operator
/// (out_dim x in_dim).
ChoiMap kraus_to_choi(const Matrix& kraus);

/// Kraus operators (out_dim x in_dim) from the Choi eigendecomposition;
/// eigenvalues below `cutoff` are dropped.
std::vector<Matrix> kraus_from_choi(const ChoiMap& map, double cutoff = 1e-12);

/// Composition second . first (apply `first`, then `second`).
ChoiMap choi_compose(const ChoiMap& second, const ChoiMap& first);

}  // namespace pmdkit

#endif  // PMDKIT_OPERATORS_HPP
