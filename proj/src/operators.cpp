#include "pmdkit/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace pmdkit {

namespace {

void require_square(const Matrix& a, const std::string& what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << what << " must be a nonempty square matrix, got " << a.rows() << "x"
       << a.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

double hermiticity_violation(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
  return a.rows() == a.cols() && a.rows() > 0 &&
         hermiticity_violation(a) <= tol;
}

void require_hermitian(const Matrix& a, double tol, const std::string& what) {
  require_square(a, what);
  const double viol = hermiticity_violation(a);
  if (viol > tol) {
    std::ostringstream os;
    os << what << " is not Hermitian: |A - A^dag| = " << viol
       << " exceeds tolerance " << tol;
    throw InvalidInputError(os.str());
  }
}

PsdReport psd_check(const Matrix& a, double tol) {
  const EigResult eig = eig_hermitian(a);
  PsdReport report;
  report.min_eigenvalue = eig.eigenvalues(0);
  report.is_psd = report.min_eigenvalue >= -tol;
  return report;
}

EigResult eig_hermitian(const Matrix& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed to converge");
  }
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

double trace_pair(const Matrix& a, const Matrix& b) {
  require_hermitian(a, kHermTol, "trace_pair: first argument");
  require_hermitian(b, kHermTol, "trace_pair: second argument");
  if (a.rows() != b.rows()) {
    throw DimensionError("trace_pair: dimension mismatch");
  }
  const Complex t = (a * b).trace();
  if (std::abs(t.imag()) > 1e-12 * std::max(1.0, std::abs(t.real()))) {
    std::ostringstream os;
    os << "trace_pair: imaginary residue " << t.imag();
    throw NumericalError(os.str());
  }
  return t.real();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_trace_first(const Matrix& m, int dim_a, int dim_b) {
  if (m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
    throw DimensionError("partial_trace_first: shape mismatch");
  }
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (int a = 0; a < dim_a; ++a) {
    out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
  }
  return out;
}

Matrix partial_trace_second(const Matrix& m, int dim_a, int dim_b) {
  if (m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
    throw DimensionError("partial_trace_second: shape mismatch");
  }
  Matrix out = Matrix::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i) {
    for (int j = 0; j < dim_a; ++j) {
      Complex s = 0.0;
      for (int b = 0; b < dim_b; ++b) {
        s += m(i * dim_b + b, j * dim_b + b);
      }
      out(i, j) = s;
    }
  }
  return out;
}

std::vector<Matrix> hermitian_basis(int dim) {
  if (dim <= 0) throw DimensionError("hermitian_basis: dim must be positive");
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    Matrix e = Matrix::Zero(dim, dim);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Matrix re = Matrix::Zero(dim, dim);
      re(i, j) = inv_sqrt2;
      re(j, i) = inv_sqrt2;
      basis.push_back(std::move(re));
      Matrix im = Matrix::Zero(dim, dim);
      im(i, j) = Complex(0.0, -inv_sqrt2);
      im(j, i) = Complex(0.0, inv_sqrt2);
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

RealVector hermitian_coords(const Matrix& a) {
  require_square(a, "hermitian_coords: operator");
  const int dim = static_cast<int>(a.rows());
  const auto basis = hermitian_basis(dim);
  RealVector v(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = (basis[k] * a).trace().real();
  }
  return v;
}

Matrix from_hermitian_coords(const RealVector& v, int dim) {
  const auto basis = hermitian_basis(dim);
  if (static_cast<std::size_t>(v.size()) != basis.size()) {
    throw DimensionError("from_hermitian_coords: coordinate count mismatch");
  }
  Matrix a = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    a += v(static_cast<Eigen::Index>(k)) * basis[k];
  }
  return a;
}

ChoiMap::ChoiMap(int in_dim_, int out_dim_, Matrix choi_)
    : in_dim(in_dim_), out_dim(out_dim_), choi(std::move(choi_)) {
  if (in_dim <= 0 || out_dim <= 0) {
    throw DimensionError("ChoiMap: dimensions must be positive");
  }
  if (choi.rows() != in_dim * out_dim || choi.cols() != in_dim * out_dim) {
    throw DimensionError("ChoiMap: choi block has wrong shape");
  }
}

void require_cp(const ChoiMap& map, double tol) {
  require_hermitian(map.choi, kHermTol, "Choi block");
  const PsdReport psd = psd_check(map.choi, tol);
  if (!psd.is_psd) {
    std::ostringstream os;
    os << "Choi block is not PSD: min eigenvalue " << psd.min_eigenvalue;
    throw InvalidInputError(os.str());
  }
}

Matrix apply_choi(const ChoiMap& map, const Matrix& state) {
  if (state.rows() != map.in_dim || state.cols() != map.in_dim) {
    throw DimensionError("apply_choi: state dimension mismatch");
  }
  require_cp(map);
  const Matrix lifted =
      kron(state.transpose(), Matrix::Identity(map.out_dim, map.out_dim)) *
      map.choi;
  return partial_trace_first(lifted, map.in_dim, map.out_dim);
}

Matrix adjoint_apply(const ChoiMap& map, const Matrix& effect) {
  if (effect.rows() != map.out_dim || effect.cols() != map.out_dim) {
    throw DimensionError("adjoint_apply: effect dimension mismatch");
  }
  const Matrix lifted =
      kron(Matrix::Identity(map.in_dim, map.in_dim), effect) * map.choi;
  return partial_trace_second(lifted, map.in_dim, map.out_dim).transpose();
}

double trace_preservation_defect(const std::vector<ChoiMap>& instrument) {
  if (instrument.empty()) {
    throw InvalidInputError("trace_preservation_defect: empty instrument");
  }
  const int in_dim = instrument.front().in_dim;
  const int out_dim = instrument.front().out_dim;
  Matrix total = Matrix::Zero(in_dim * out_dim, in_dim * out_dim);
  for (const ChoiMap& map : instrument) {
    if (map.in_dim != in_dim || map.out_dim != out_dim) {
      throw DimensionError("trace_preservation_defect: mixed dimensions");
    }
    total += map.choi;
  }
  const Matrix reduced = partial_trace_second(total, in_dim, out_dim);
  return (reduced - Matrix::Identity(in_dim, in_dim)).cwiseAbs().maxCoeff();
}

ChoiMap identity_choi(int dim) {
  Matrix choi = Matrix::Zero(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      choi(i * dim + i, j * dim + j) = 1.0;
    }
  }
  return ChoiMap(dim, dim, std::move(choi));
}

ChoiMap depolarizing_choi(int in_dim, int out_dim) {
  Matrix choi = kron(Matrix::Identity(in_dim, in_dim),
                     Matrix::Identity(out_dim, out_dim) / out_dim);
  return ChoiMap(in_dim, out_dim, std::move(choi));
}

ChoiMap kraus_to_choi(const Matrix& kraus) {
  const int out_dim = static_cast<int>(kraus.rows());
  const int in_dim = static_cast<int>(kraus.cols());
  Matrix choi = Matrix::Zero(in_dim * out_dim, in_dim * out_dim);
  // choi(i*out+o, j*out+p) = K(o,i) conj(K(p,j))
  for (int i = 0; i < in_dim; ++i) {
    for (int j = 0; j < in_dim; ++j) {
      for (int o = 0; o < out_dim; ++o) {
        for (int p = 0; p < out_dim; ++p) {
          choi(i * out_dim + o, j * out_dim + p) =
              kraus(o, i) * std::conj(kraus(p, j));
        }
      }
    }
  }
  return ChoiMap(in_dim, out_dim, std::move(choi));
}

std::vector<Matrix> kraus_from_choi(const ChoiMap& map, double cutoff) {
  require_cp(map);
  const EigResult eig = eig_hermitian(map.choi);
  const double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda <= cutoff * scale) continue;
    Matrix op(map.out_dim, map.in_dim);
    for (int i = 0; i < map.in_dim; ++i) {
      for (int o = 0; o < map.out_dim; ++o) {
        op(o, i) = std::sqrt(lambda) * eig.eigenvectors(i * map.out_dim + o, k);
      }
    }
    kraus.push_back(std::move(op));
  }
  return kraus;
}

ChoiMap choi_compose(const ChoiMap& second, const ChoiMap& first) {
  if (second.in_dim != first.out_dim) {
    throw DimensionError("choi_compose: inner dimensions do not match");
  }
  const auto kraus_first = kraus_from_choi(first);
  const auto kraus_second = kraus_from_choi(second);
  Matrix choi = Matrix::Zero(first.in_dim * second.out_dim,
                             first.in_dim * second.out_dim);
  for (const Matrix& kf : kraus_first) {
    for (const Matrix& ks : kraus_second) {
      choi += kraus_to_choi(ks * kf).choi;
    }
  }
  return ChoiMap(first.in_dim, second.out_dim, std::move(choi));
}

}  // namespace pmdkit
