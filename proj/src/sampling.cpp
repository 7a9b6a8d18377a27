#include "pmdkit/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace pmdkit {

namespace {

Matrix inverse_sqrt(const Matrix& psd) {
  const EigResult eig = eig_hermitian(psd);
  const double floor = 1e-12 * std::max(1.0, eig.eigenvalues.maxCoeff());
  Vector inv(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    inv(k) = 1.0 / std::sqrt(std::max(eig.eigenvalues(k), floor));
  }
  return eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.adjoint();
}

std::vector<double> random_distribution(int n, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& v : p) {
    v = unif(rng);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<std::string> indexed_labels(const char* stem, int n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (int k = 0; k < n; ++k) labels.push_back(stem + std::to_string(k));
  return labels;
}

}  // namespace

Matrix random_hermitian(int dim, Rng& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = Complex(gauss(rng), gauss(rng));
    }
  }
  return scale * 0.5 * (a + Matrix(a.adjoint()));
}

Matrix random_psd(int dim, Rng& rng, double scale) {
  const Matrix h = random_hermitian(dim, rng);
  return scale * (h * h.adjoint());
}

Matrix random_density(int dim, Rng& rng) {
  const Matrix p = random_psd(dim, rng);
  return p / p.trace().real();
}

Matrix random_unitary(int dim, Rng& rng) {
  return eig_hermitian(random_hermitian(dim, rng)).eigenvectors;
}

Povm random_povm(int dim, int n_outcomes, Rng& rng) {
  std::vector<Matrix> raw;
  Matrix total = Matrix::Zero(dim, dim);
  for (int a = 0; a < n_outcomes; ++a) {
    raw.push_back(random_psd(dim, rng) +
                  0.05 * Matrix::Identity(dim, dim));
    total += raw.back();
  }
  const Matrix t = inverse_sqrt(total);
  Povm povm;
  for (Matrix& w : raw) {
    Matrix e = t * w * t;
    povm.effects.push_back(0.5 * (e + Matrix(e.adjoint())));
  }
  return povm;
}

Pmd random_pmd(int dim, int n_programs, int n_outcomes, Rng& rng) {
  Pmd pmd;
  pmd.dim = dim;
  pmd.programs = indexed_labels("x", n_programs);
  pmd.outcomes = indexed_labels("a", n_outcomes);
  for (int x = 0; x < n_programs; ++x) {
    const Povm povm = random_povm(dim, n_outcomes, rng);
    for (int a = 0; a < n_outcomes; ++a) {
      pmd.effects.push_back(povm.effects[a]);
    }
  }
  return pmd;
}

SimplePmdSample random_simple_pmd(int dim, int n_programs, int n_outcomes,
                                  int n_parent, Rng& rng) {
  SimpleDecomposition dec;
  dec.parent = random_povm(dim, n_parent, rng);
  dec.programs = indexed_labels("x", n_programs);
  dec.outcomes = indexed_labels("a", n_outcomes);
  dec.post.resize(static_cast<std::size_t>(n_parent) * n_programs *
                  n_outcomes);
  for (int i = 0; i < n_parent; ++i) {
    for (int x = 0; x < n_programs; ++x) {
      const auto row = random_distribution(n_outcomes, rng);
      for (int a = 0; a < n_outcomes; ++a) {
        dec.post[(static_cast<std::size_t>(i) * n_programs + x) * n_outcomes +
                 a] = row[a];
      }
    }
  }
  Pmd pmd;
  pmd.dim = dim;
  pmd.programs = dec.programs;
  pmd.outcomes = dec.outcomes;
  pmd.effects.assign(static_cast<std::size_t>(n_programs) * n_outcomes,
                     Matrix::Zero(dim, dim));
  for (int x = 0; x < n_programs; ++x) {
    for (int a = 0; a < n_outcomes; ++a) {
      for (int i = 0; i < n_parent; ++i) {
        pmd.effect(a, x) += dec.post_prob(a, i, x) * dec.parent.effects[i];
      }
    }
  }
  return SimplePmdSample{std::move(pmd), std::move(dec)};
}

Ensemble random_ensemble(int dim, int n_post_info, int n_answers, Rng& rng) {
  Ensemble ens;
  ens.dim = dim;
  ens.post_info = indexed_labels("w", n_post_info);
  ens.answers = indexed_labels("z", n_answers);
  double total = 0.0;
  for (int k = 0; k < n_post_info * n_answers; ++k) {
    ens.states.push_back(random_psd(dim, rng));
    total += ens.states.back().trace().real();
  }
  for (Matrix& s : ens.states) s /= total;
  return ens;
}

ClassicalChannel random_channel(std::vector<int> input_sizes, int output_size,
                                Rng& rng) {
  ClassicalChannel ch;
  ch.input_sizes = std::move(input_sizes);
  ch.output_size = output_size;
  ch.table.reserve(static_cast<std::size_t>(ch.joint_inputs()) * output_size);
  for (int j = 0; j < ch.joint_inputs(); ++j) {
    const auto row = random_distribution(output_size, rng);
    ch.table.insert(ch.table.end(), row.begin(), row.end());
  }
  return ch;
}

FreeOperation random_free_operation(int source_dim, int n_source_programs,
                                    int n_source_outcomes, int target_dim,
                                    int n_target_programs,
                                    int n_target_outcomes, int n_random,
                                    int n_instrument_outcomes, Rng& rng) {
  FreeOperation op;
  op.randomness = random_distribution(n_random, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < n_random; ++r) {
    std::vector<Matrix> kraus;
    Matrix gram = Matrix::Zero(target_dim, target_dim);
    for (int i = 0; i < n_instrument_outcomes; ++i) {
      Matrix k(source_dim, target_dim);
      for (int row = 0; row < source_dim; ++row) {
        for (int col = 0; col < target_dim; ++col) {
          k(row, col) = Complex(gauss(rng), gauss(rng));
        }
      }
      kraus.push_back(k);
      gram += k.adjoint() * k;
    }
    const Matrix t = inverse_sqrt(gram);
    std::vector<ChoiMap> family;
    for (Matrix& k : kraus) {
      family.push_back(kraus_to_choi(k * t));
    }
    op.instruments.push_back(std::move(family));
  }
  op.target_programs = indexed_labels("y", n_target_programs);
  op.target_outcomes = indexed_labels("b", n_target_outcomes);
  op.pre = random_channel({n_instrument_outcomes, n_target_programs, n_random},
                          n_source_programs, rng);
  op.post = random_channel({n_source_outcomes, n_source_programs,
                            n_instrument_outcomes, n_target_programs,
                            n_random},
                           n_target_outcomes, rng);
  return op;
}

Pmd noisy_mub_pmd(double eta, int dim) {
  if (dim < 2) throw DimensionError("noisy_mub_pmd: dim must be at least 2");
  if (eta < 0.0 || eta > 1.0) {
    throw InvalidInputError("noisy_mub_pmd: eta must lie in [0, 1]");
  }
  // Fourier basis is mutually unbiased with the computational one.
  Matrix fourier(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      const double phase = 2.0 * std::numbers::pi * j * k / dim;
      fourier(j, k) = norm * Complex(std::cos(phase), std::sin(phase));
    }
  }
  Pmd pmd;
  pmd.dim = dim;
  pmd.programs = {"X", "Z"};
  pmd.outcomes.reserve(dim);
  for (int k = 0; k < dim; ++k) pmd.outcomes.push_back(std::to_string(k));
  const Matrix noise =
      (1.0 - eta) / dim * Matrix::Identity(dim, dim);
  for (int k = 0; k < dim; ++k) {  // program "X"
    const Vector col = fourier.col(k);
    pmd.effects.push_back(eta * (col * col.adjoint()) + noise);
  }
  for (int k = 0; k < dim; ++k) {  // program "Z"
    Matrix proj = Matrix::Zero(dim, dim);
    proj(k, k) = 1.0;
    pmd.effects.push_back(eta * proj + noise);
  }
  return pmd;
}

Pmd noisy_qubit_pair_pmd(double eta, const Eigen::Vector3d& a_axis,
                         const Eigen::Vector3d& b_axis) {
  auto bloch = [](const Eigen::Vector3d& n) {
    Matrix m(2, 2);
    m << Complex(n.z(), 0.0), Complex(n.x(), -n.y()), Complex(n.x(), n.y()),
        Complex(-n.z(), 0.0);
    return m;
  };
  Pmd pmd;
  pmd.dim = 2;
  pmd.programs = {"A", "B"};
  pmd.outcomes = {"+", "-"};
  const Matrix id = Matrix::Identity(2, 2);
  for (const Eigen::Vector3d& axis : {a_axis, b_axis}) {
    const Matrix obs = bloch(axis.normalized());
    pmd.effects.push_back(0.5 * (id + eta * obs));
    pmd.effects.push_back(0.5 * (id - eta * obs));
  }
  return pmd;
}

GuessingGame bb84_game() {
  Ensemble ens;
  ens.dim = 2;
  ens.post_info = {"X", "Z"};
  ens.answers = {"0", "1"};
  Vector plus(2), minus(2), zero(2), one(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  zero << 1.0, 0.0;
  one << 0.0, 1.0;
  for (const Vector& psi : {plus, minus, zero, one}) {
    ens.states.push_back(0.25 * (psi * psi.adjoint()));
  }
  return GuessingGame{std::move(ens)};
}

}  // namespace pmdkit
