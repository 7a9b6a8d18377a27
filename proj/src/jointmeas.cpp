#include "pmdkit/jointmeas.hpp"

#include <cmath>
#include <sstream>

namespace pmdkit::jointmeas {

long long response_count(int n_outcomes, int n_programs) {
  long long count = 1;
  for (int x = 0; x < n_programs; ++x) {
    count *= n_outcomes;
    if (count > 4 * kMaxResponseFunctions) return count;  // early out
  }
  return count;
}

int response_value(long long h, int x, int n_outcomes) {
  for (int k = 0; k < x; ++k) h /= n_outcomes;
  return static_cast<int>(h % n_outcomes);
}

CompatibilityResult check_simple(const Pmd& pmd,
                                 const CompatibilityOptions& opts) {
  require_valid(pmd);
  const int n_a = pmd.n_outcomes();
  const int n_x = pmd.n_programs();
  const int d = pmd.dim;
  const long long n_h = response_count(n_a, n_x);
  if (n_h > kMaxResponseFunctions) {
    std::ostringstream os;
    os << "parent parametrization needs " << n_h
       << " response functions, above the limit of " << kMaxResponseFunctions;
    throw InvalidInputError(os.str());
  }
  const int h_count = static_cast<int>(n_h);
  const double per_slot = static_cast<double>(n_h) / n_a;  // |A|^(|X|-1)

  // Variables: slack block u (1x1) and parent residuals P_h >= 0, with
  // parent blocks G_h = P_h + (u - 1) 1. The optimal slack is u* - 1;
  // u stays within [0, 1 + 1/|A|^|X|] because Sigma_h G_h = 1.
  sdp::SdpProblem problem;
  problem.sense = sdp::Sense::Maximize;
  problem.blocks.push_back({"u", 1});
  for (int h = 0; h < h_count; ++h) {
    problem.blocks.push_back({"p" + std::to_string(h), d});
  }
  problem.objective = {{0, Matrix::Identity(1, 1)}};

  const auto basis = hermitian_basis(d);
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      for (const Matrix& e : basis) {
        sdp::Constraint con;
        for (int h = 0; h < h_count; ++h) {
          if (response_value(h, x, n_a) == a) {
            con.lhs.push_back({1 + h, e});
          }
        }
        const double tr_e = e.trace().real();
        if (tr_e != 0.0) {
          con.lhs.push_back({0, per_slot * tr_e * Matrix::Identity(1, 1)});
        }
        con.rhs = (e * pmd.effect(a, x)).trace().real() + per_slot * tr_e;
        problem.constraints.push_back(std::move(con));
      }
    }
  }

  const sdp::SdpSolution sol = sdp::solve(problem, opts.solver);
  if (sol.status != sdp::SolveStatus::Optimal) {
    throw NumericalError("compatibility program did not solve: " +
                         sdp::to_string(sol.status) +
                         (sol.message.empty() ? "" : " (" + sol.message + ")"));
  }

  CompatibilityResult result;
  result.slack = sol.primal_value - 1.0;
  result.is_simple = result.slack >= -opts.slack_tol;

  if (result.is_simple) {
    std::vector<Matrix> parent(h_count);
    double min_eig = 0.0;
    for (int h = 0; h < h_count; ++h) {
      parent[h] = sol.blocks[1 + h] +
                  result.slack * Matrix::Identity(d, d);
      min_eig = std::min(min_eig, psd_check(parent[h]).min_eigenvalue);
    }
    if (min_eig < 0.0) {
      // shift-and-rescale onto the PSD cone; completeness is preserved
      const double delta = -min_eig + 1e-14;
      const double scale = 1.0 / (1.0 + h_count * delta);
      for (Matrix& g : parent) {
        g = scale * (g + delta * Matrix::Identity(d, d));
      }
    }
    SimpleDecomposition dec;
    dec.parent.effects = std::move(parent);
    dec.programs = pmd.programs;
    dec.outcomes = pmd.outcomes;
    dec.post.assign(static_cast<std::size_t>(h_count) * n_x * n_a, 0.0);
    for (int h = 0; h < h_count; ++h) {
      for (int x = 0; x < n_x; ++x) {
        const int a = response_value(h, x, n_a);
        dec.post[(static_cast<std::size_t>(h) * n_x + x) * n_a + a] = 1.0;
      }
    }
    result.decomposition = std::move(dec);
  } else {
    // The equality multipliers assemble the separating functional.
    const int d2 = d * d;
    std::vector<Matrix> witness(static_cast<std::size_t>(n_x) * n_a,
                                Matrix::Zero(d, d));
    int con_index = 0;
    for (int x = 0; x < n_x; ++x) {
      for (int a = 0; a < n_a; ++a) {
        for (int k = 0; k < d2; ++k) {
          witness[static_cast<std::size_t>(x) * n_a + a] +=
              sol.multipliers(con_index++) * basis[k];
        }
      }
    }
    double on_device = 0.0;
    for (int x = 0; x < n_x; ++x) {
      for (int a = 0; a < n_a; ++a) {
        on_device += (witness[static_cast<std::size_t>(x) * n_a + a] *
                      pmd.effect(a, x))
                         .trace()
                         .real();
      }
    }
    if (on_device < 0.0) {
      for (Matrix& w : witness) w = -w;
      on_device = -on_device;
    }
    result.witness_margin = on_device;
    result.witness = std::move(witness);
  }
  return result;
}

Pmd reconstruct(const SimpleDecomposition& dec) {
  const ValidationReport report = validate_decomposition(dec);
  if (!report.ok()) {
    throw InvalidInputError("invalid decomposition: " + report.summary());
  }
  Pmd pmd;
  pmd.dim = dec.parent.dim();
  pmd.programs = dec.programs;
  pmd.outcomes = dec.outcomes;
  const int n_x = dec.n_programs();
  const int n_a = dec.n_outcomes();
  pmd.effects.assign(static_cast<std::size_t>(n_x) * n_a,
                     Matrix::Zero(pmd.dim, pmd.dim));
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      for (int i = 0; i < dec.parent.outcomes(); ++i) {
        pmd.effect(a, x) += dec.post_prob(a, i, x) * dec.parent.effects[i];
      }
    }
  }
  return pmd;
}

}  // namespace pmdkit::jointmeas
