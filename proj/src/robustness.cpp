#include "pmdkit/robustness.hpp"

#include "pmdkit/games.hpp"
#include "pmdkit/jointmeas.hpp"

#include <cmath>
#include <sstream>

namespace pmdkit::robustness {

namespace {

using jointmeas::response_count;
using jointmeas::response_value;

int guarded_response_count(const Pmd& pmd) {
  const long long n_h = response_count(pmd.n_outcomes(), pmd.n_programs());
  if (n_h > jointmeas::kMaxResponseFunctions) {
    std::ostringstream os;
    os << "parent parametrization needs " << n_h
       << " response functions, above the limit of "
       << jointmeas::kMaxResponseFunctions;
    throw InvalidInputError(os.str());
  }
  return static_cast<int>(n_h);
}

Matrix psd_clip(const Matrix& a) {
  const EigResult eig = eig_hermitian(a);
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (eig.eigenvalues(k) > 0.0) {
      out += eig.eigenvalues(k) * eig.eigenvectors.col(k) *
             eig.eigenvectors.col(k).adjoint();
    }
  }
  return out;
}

}  // namespace

RobustnessResult primal(const Pmd& pmd, const RobustnessOptions& opts) {
  require_valid(pmd);
  const int n_a = pmd.n_outcomes();
  const int n_x = pmd.n_programs();
  const int d = pmd.dim;
  const int n_h = guarded_response_count(pmd);
  const auto basis = hermitian_basis(d);

  // blocks: [0] noise weight lambda (1x1), [1 .. nx*na] noise N'(a|x),
  // [1 + nx*na .. ] parent blocks G_h of M + N'.
  sdp::SdpProblem problem;
  problem.sense = sdp::Sense::Minimize;
  problem.blocks.push_back({"lambda", 1});
  auto noise_block = [&](int x, int a) { return 1 + x * n_a + a; };
  auto parent_block = [&](int h) { return 1 + n_x * n_a + h; };
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      problem.blocks.push_back(
          {"n_" + std::to_string(x) + "_" + std::to_string(a), d});
    }
  }
  for (int h = 0; h < n_h; ++h) {
    problem.blocks.push_back({"g" + std::to_string(h), d});
  }
  problem.objective = {{0, Matrix::Identity(1, 1)}};

  // sum_a N'(a|x) = lambda 1 for every program
  for (int x = 0; x < n_x; ++x) {
    for (const Matrix& e : basis) {
      sdp::Constraint con;
      for (int a = 0; a < n_a; ++a) con.lhs.push_back({noise_block(x, a), e});
      const double tr_e = e.trace().real();
      if (tr_e != 0.0) {
        con.lhs.push_back({0, -tr_e * Matrix::Identity(1, 1)});
      }
      con.rhs = 0.0;
      problem.constraints.push_back(std::move(con));
    }
  }
  // sum_{h: h(x)=a} G_h - N'(a|x) = M(a|x)
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      for (const Matrix& e : basis) {
        sdp::Constraint con;
        for (int h = 0; h < n_h; ++h) {
          if (response_value(h, x, n_a) == a) {
            con.lhs.push_back({parent_block(h), e});
          }
        }
        con.lhs.push_back({noise_block(x, a), -e});
        con.rhs = (e * pmd.effect(a, x)).trace().real();
        problem.constraints.push_back(std::move(con));
      }
    }
  }

  const sdp::SdpSolution sol = sdp::solve(problem, opts.solver);
  if (sol.status != sdp::SolveStatus::Optimal) {
    throw NumericalError("robustness primal did not solve: " +
                         sdp::to_string(sol.status) +
                         (sol.message.empty() ? "" : " (" + sol.message + ")"));
  }

  RobustnessResult result;
  result.value = sol.primal_value;
  result.dual_value = sol.dual_value;
  result.gap = std::abs(sol.primal_value - sol.dual_value);
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      result.noise.push_back(sol.blocks[noise_block(x, a)]);
    }
  }
  for (int h = 0; h < n_h; ++h) {
    result.parent.push_back(sol.blocks[parent_block(h)]);
  }
  return result;
}

double witness_cone_defect(const RobustnessWitness& witness) {
  const int n_x = static_cast<int>(witness.programs.size());
  const int n_a = static_cast<int>(witness.outcomes.size());
  Matrix gamma_sum = Matrix::Zero(witness.dim, witness.dim);
  for (const Matrix& g : witness.gamma) gamma_sum += g;
  const long long n_h = response_count(n_a, n_x);
  double defect = 0.0;
  for (long long h = 0; h < n_h; ++h) {
    Matrix omega_sum = Matrix::Zero(witness.dim, witness.dim);
    for (int x = 0; x < n_x; ++x) {
      omega_sum += witness.omega[static_cast<std::size_t>(x) * n_a +
                                 response_value(h, x, n_a)];
    }
    defect = std::min(defect,
                      psd_check(gamma_sum - omega_sum).min_eigenvalue);
  }
  return defect;
}

DualResult dual(const Pmd& pmd, const RobustnessOptions& opts) {
  require_valid(pmd);
  const int n_a = pmd.n_outcomes();
  const int n_x = pmd.n_programs();
  const int d = pmd.dim;
  const int n_h = guarded_response_count(pmd);
  const auto basis = hermitian_basis(d);

  // blocks: omega_{a,x} (nx*na), the summed gamma block, and one PSD
  // slack per response function for the dual-cone constraints. Only the
  // sum of the gamma_x enters the program, so a single block carries it.
  sdp::SdpProblem problem;
  problem.sense = sdp::Sense::Maximize;
  auto omega_block = [&](int x, int a) { return x * n_a + a; };
  const int gamma_block = n_x * n_a;
  auto slack_block = [&](int h) { return n_x * n_a + 1 + h; };
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      problem.blocks.push_back(
          {"w_" + std::to_string(x) + "_" + std::to_string(a), d});
    }
  }
  problem.blocks.push_back({"gamma", d});
  for (int h = 0; h < n_h; ++h) {
    problem.blocks.push_back({"z" + std::to_string(h), d});
  }

  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      problem.objective.push_back({omega_block(x, a), pmd.effect(a, x)});
    }
  }

  {
    sdp::Constraint norm;
    norm.lhs.push_back({gamma_block, Matrix::Identity(d, d)});
    norm.rhs = 1.0;
    problem.constraints.push_back(std::move(norm));
  }
  for (int h = 0; h < n_h; ++h) {
    for (const Matrix& e : basis) {
      sdp::Constraint con;
      con.lhs.push_back({gamma_block, e});
      for (int x = 0; x < n_x; ++x) {
        con.lhs.push_back({omega_block(x, response_value(h, x, n_a)), -e});
      }
      con.lhs.push_back({slack_block(h), -e});
      con.rhs = 0.0;
      problem.constraints.push_back(std::move(con));
    }
  }

  const sdp::SdpSolution sol = sdp::solve(problem, opts.solver);
  if (sol.status != sdp::SolveStatus::Optimal) {
    throw NumericalError("robustness dual did not solve: " +
                         sdp::to_string(sol.status) +
                         (sol.message.empty() ? "" : " (" + sol.message + ")"));
  }

  DualResult result;
  result.value = sol.primal_value - 1.0;
  result.witness.dim = d;
  result.witness.programs = pmd.programs;
  result.witness.outcomes = pmd.outcomes;
  // the program constrains only the sum of the gamma_x; report the
  // balanced split
  const Matrix gamma_each = sol.blocks[gamma_block] / n_x;
  double s = 0.0;
  for (int x = 0; x < n_x; ++x) {
    result.witness.gamma.push_back(gamma_each);
    for (int a = 0; a < n_a; ++a) {
      result.witness.omega.push_back(sol.blocks[omega_block(x, a)]);
      s += result.witness.omega.back().trace().real();
    }
  }
  result.witness.normalization = s;
  return result;
}

GuessingGame witness_to_game(const RobustnessWitness& witness) {
  if (witness.normalization <= 1e-12) {
    throw InvalidInputError(
        "degenerate witness: total omega trace is not positive");
  }
  Ensemble ens;
  ens.dim = witness.dim;
  ens.post_info = witness.programs;
  ens.answers = witness.outcomes;
  const int n_x = static_cast<int>(witness.programs.size());
  const int n_a = static_cast<int>(witness.outcomes.size());
  // clip solver-scale negative tails so the ensemble validator is happy
  std::vector<Matrix> clipped;
  double total = 0.0;
  for (int x = 0; x < n_x; ++x) {
    for (int a = 0; a < n_a; ++a) {
      clipped.push_back(
          psd_clip(witness.omega[static_cast<std::size_t>(x) * n_a + a]));
      total += clipped.back().trace().real();
    }
  }
  for (Matrix& m : clipped) m /= total;
  ens.states = std::move(clipped);
  return GuessingGame{std::move(ens)};
}

AdvantageReport verify_advantage_identity(const Pmd& pmd,
                                          const RobustnessOptions& opts) {
  const DualResult d = dual(pmd, opts);
  const GuessingGame game = witness_to_game(d.witness);

  AdvantageReport report;
  report.robustness = d.value;
  for (int x = 0; x < pmd.n_programs(); ++x) {
    for (int a = 0; a < pmd.n_outcomes(); ++a) {
      report.direct_payoff +=
          (pmd.effect(a, x) * game.ensemble.state(x, a)).trace().real();
    }
  }
  report.simple_value = games::pguess_simple(game, opts.solver).value;
  report.ratio = report.direct_payoff / report.simple_value;
  report.difference = std::abs(report.ratio - (1.0 + report.robustness));
  report.classical_ratio =
      games::pguess_classical(pmd, game).value / report.simple_value;
  report.pass = report.difference <= kAdvantageIdentityTol;
  return report;
}

}  // namespace pmdkit::robustness
