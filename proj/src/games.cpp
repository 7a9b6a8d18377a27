#include "pmdkit/games.hpp"

#include "pmdkit/jointmeas.hpp"
#include "pmdkit/robustness.hpp"
#include "pmdkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pmdkit::games {

namespace {

long long answer_function_count(int n_answers, int n_post_info) {
  long long count = 1;
  for (int w = 0; w < n_post_info; ++w) {
    count *= n_answers;
    if (count > 4 * kMaxAnswerFunctions) return count;
  }
  return count;
}

int answer_function_value(long long f, int w, int n_answers) {
  for (int k = 0; k < w; ++k) f /= n_answers;
  return static_cast<int>(f % n_answers);
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

StrategyValue pguess_classical(const Pmd& pmd, const GuessingGame& game) {
  require_valid(pmd);
  require_valid(game.ensemble);
  if (game.ensemble.dim != pmd.dim) {
    throw DimensionError(
        "pguess_classical: game and device dimensions differ");
  }
  const Ensemble& ens = game.ensemble;
  const int n_w = ens.n_post_info();
  const int n_z = ens.n_answers();
  const int n_x = pmd.n_programs();
  const int n_a = pmd.n_outcomes();

  StrategyValue result;
  ClassicalStrategy strategy;
  strategy.program_for_post_info.resize(n_w);
  strategy.answer_for_outcome.assign(n_w, std::vector<int>(n_a, 0));

  double total = 0.0;
  for (int w = 0; w < n_w; ++w) {
    double best = -std::numeric_limits<double>::infinity();
    int best_x = 0;
    std::vector<int> best_answers(n_a, 0);
    for (int x = 0; x < n_x; ++x) {
      double value = 0.0;
      std::vector<int> answers(n_a, 0);
      for (int a = 0; a < n_a; ++a) {
        double top = -std::numeric_limits<double>::infinity();
        for (int z = 0; z < n_z; ++z) {
          const double p = (ens.state(w, z) * pmd.effect(a, x)).trace().real();
          if (p > top) {
            top = p;
            answers[a] = z;
          }
        }
        value += top;
      }
      if (value > best) {
        best = value;
        best_x = x;
        best_answers = answers;
      }
    }
    total += best;
    strategy.program_for_post_info[w] = best_x;
    strategy.answer_for_outcome[w] = best_answers;
  }

  Pmd response;
  response.dim = pmd.dim;
  response.programs = ens.post_info;
  response.outcomes = ens.answers;
  response.effects.assign(static_cast<std::size_t>(n_w) * n_z,
                          Matrix::Zero(pmd.dim, pmd.dim));
  for (int w = 0; w < n_w; ++w) {
    const int x = strategy.program_for_post_info[w];
    for (int a = 0; a < n_a; ++a) {
      response.effect(strategy.answer_for_outcome[w][a], w) +=
          pmd.effect(a, x);
    }
  }

  result.value = total;
  result.classical = std::move(strategy);
  result.response = std::move(response);
  return result;
}

StrategyValue pguess_simple(const GuessingGame& game,
                            const sdp::SolveOptions& solver) {
  require_valid(game.ensemble);
  const Ensemble& ens = game.ensemble;
  const int n_w = ens.n_post_info();
  const int n_z = ens.n_answers();
  const int d = ens.dim;
  const long long n_f = answer_function_count(n_z, n_w);
  if (n_f > kMaxAnswerFunctions) {
    std::ostringstream os;
    os << "function-POVM parametrization needs " << n_f
       << " blocks, above the limit of " << kMaxAnswerFunctions;
    throw InvalidInputError(os.str());
  }
  const int f_count = static_cast<int>(n_f);

  sdp::SdpProblem problem;
  problem.sense = sdp::Sense::Maximize;
  for (int f = 0; f < f_count; ++f) {
    problem.blocks.push_back({"t" + std::to_string(f), d});
  }
  for (int f = 0; f < f_count; ++f) {
    Matrix sigma = Matrix::Zero(d, d);
    for (int w = 0; w < n_w; ++w) {
      sigma += ens.state(w, answer_function_value(f, w, n_z));
    }
    sigma = 0.5 * (sigma + Matrix(sigma.adjoint()));
    problem.objective.push_back({f, std::move(sigma)});
  }
  for (const Matrix& e : hermitian_basis(d)) {
    sdp::Constraint con;
    for (int f = 0; f < f_count; ++f) con.lhs.push_back({f, e});
    con.rhs = e.trace().real();
    problem.constraints.push_back(std::move(con));
  }

  const sdp::SdpSolution sol = sdp::solve(problem, solver);
  if (sol.status != sdp::SolveStatus::Optimal) {
    throw NumericalError("simple-benchmark program did not solve: " +
                         sdp::to_string(sol.status) +
                         (sol.message.empty() ? "" : " (" + sol.message + ")"));
  }
  StrategyValue result;
  result.value = sol.primal_value;
  result.function_povm = sol.blocks;
  return result;
}

namespace {

struct SeesawStrategy {
  std::vector<int> program;                 // f(i, w), index i * n_w + w
  std::vector<std::vector<int>> answers;    // g(i, w)[a], index i * n_w + w
};

// Exact classical optimization for fixed instrument blocks; fills the
// strategy and returns the payoff.
double seesaw_classical_step(const std::vector<ChoiMap>& instrument,
                             const Pmd& pmd, const Ensemble& ens,
                             SeesawStrategy& strategy) {
  const int n_i = static_cast<int>(instrument.size());
  const int n_w = ens.n_post_info();
  const int n_z = ens.n_answers();
  const int n_x = pmd.n_programs();
  const int n_a = pmd.n_outcomes();
  strategy.program.assign(static_cast<std::size_t>(n_i) * n_w, 0);
  strategy.answers.assign(static_cast<std::size_t>(n_i) * n_w,
                          std::vector<int>(n_a, 0));
  double total = 0.0;
  for (int i = 0; i < n_i; ++i) {
    for (int w = 0; w < n_w; ++w) {
      std::vector<Matrix> processed(n_z);
      for (int z = 0; z < n_z; ++z) {
        processed[z] = apply_choi(instrument[i], ens.state(w, z));
      }
      double best = -std::numeric_limits<double>::infinity();
      int best_x = 0;
      std::vector<int> best_answers(n_a, 0);
      for (int x = 0; x < n_x; ++x) {
        double value = 0.0;
        std::vector<int> answers(n_a, 0);
        for (int a = 0; a < n_a; ++a) {
          double top = -std::numeric_limits<double>::infinity();
          for (int z = 0; z < n_z; ++z) {
            const double p =
                (processed[z] * pmd.effect(a, x)).trace().real();
            if (p > top) {
              top = p;
              answers[a] = z;
            }
          }
          value += top;
        }
        if (value > best) {
          best = value;
          best_x = x;
          best_answers = answers;
        }
      }
      strategy.program[static_cast<std::size_t>(i) * n_w + w] = best_x;
      strategy.answers[static_cast<std::size_t>(i) * n_w + w] = best_answers;
      total += best;
    }
  }
  return total;
}

// Instrument blocks optimal for a fixed classical strategy: linear SDP
// over Choi blocks with the trace-preserving-in-sum constraint.
std::vector<ChoiMap> seesaw_instrument_step(const SeesawStrategy& strategy,
                                            const Pmd& pmd,
                                            const Ensemble& ens, int n_i,
                                            const sdp::SolveOptions& solver) {
  const int d_r = ens.dim;
  const int d_q = pmd.dim;
  const int n_w = ens.n_post_info();
  const int n_a = pmd.n_outcomes();
  sdp::SdpProblem problem;
  problem.sense = sdp::Sense::Maximize;
  for (int i = 0; i < n_i; ++i) {
    problem.blocks.push_back({"j" + std::to_string(i), d_r * d_q});
  }
  for (int i = 0; i < n_i; ++i) {
    Matrix k = Matrix::Zero(d_r * d_q, d_r * d_q);
    for (int w = 0; w < n_w; ++w) {
      const int x = strategy.program[static_cast<std::size_t>(i) * n_w + w];
      const auto& answers =
          strategy.answers[static_cast<std::size_t>(i) * n_w + w];
      for (int a = 0; a < n_a; ++a) {
        k += kron(ens.state(w, answers[a]).transpose(), pmd.effect(a, x));
      }
    }
    k = 0.5 * (k + Matrix(k.adjoint()));
    if (k.cwiseAbs().maxCoeff() > 0.0) {
      problem.objective.push_back({i, std::move(k)});
    }
  }
  const Matrix id_q = Matrix::Identity(d_q, d_q);
  for (const Matrix& e : hermitian_basis(d_r)) {
    sdp::Constraint con;
    const Matrix lifted = kron(e, id_q);
    for (int i = 0; i < n_i; ++i) con.lhs.push_back({i, lifted});
    con.rhs = e.trace().real();
    problem.constraints.push_back(std::move(con));
  }
  const sdp::SdpSolution sol = sdp::solve(problem, solver);
  if (sol.status != sdp::SolveStatus::Optimal) {
    throw NumericalError("instrument program did not solve: " +
                         sdp::to_string(sol.status));
  }
  std::vector<ChoiMap> instrument;
  instrument.reserve(n_i);
  for (int i = 0; i < n_i; ++i) {
    instrument.emplace_back(d_r, d_q, psd_clip(sol.blocks[i]));
  }
  return instrument;
}

std::vector<ChoiMap> identity_padded_instrument(int dim, int n_i) {
  std::vector<ChoiMap> instrument;
  instrument.push_back(identity_choi(dim));
  for (int i = 1; i < n_i; ++i) {
    instrument.emplace_back(dim, dim, Matrix::Zero(dim * dim, dim * dim));
  }
  return instrument;
}

// Subspace compression d_r -> d_q (or isometric embedding when
// d_r < d_q), completed to a channel, as the first instrument outcome.
std::vector<ChoiMap> subspace_instrument(int d_r, int d_q, int n_i) {
  Matrix choi = Matrix::Zero(d_r * d_q, d_r * d_q);
  if (d_r >= d_q) {
    Matrix v_dag = Matrix::Zero(d_q, d_r);  // compress onto the first d_q
    for (int k = 0; k < d_q; ++k) v_dag(k, k) = 1.0;
    choi += kraus_to_choi(v_dag).choi;
    for (int j = d_q; j < d_r; ++j) {
      for (int m = 0; m < d_q; ++m) {
        Matrix k = Matrix::Zero(d_q, d_r);
        k(m, j) = 1.0 / std::sqrt(static_cast<double>(d_q));
        choi += kraus_to_choi(k).choi;
      }
    }
  } else {
    Matrix w = Matrix::Zero(d_q, d_r);  // isometric embedding
    for (int k = 0; k < d_r; ++k) w(k, k) = 1.0;
    choi += kraus_to_choi(w).choi;
  }
  std::vector<ChoiMap> instrument;
  instrument.emplace_back(d_r, d_q, std::move(choi));
  for (int i = 1; i < n_i; ++i) {
    instrument.emplace_back(d_r, d_q, Matrix::Zero(d_r * d_q, d_r * d_q));
  }
  return instrument;
}

std::vector<ChoiMap> random_instrument(int d_r, int d_q, int n_i, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Matrix> kraus;
  Matrix gram = Matrix::Zero(d_r, d_r);
  for (int i = 0; i < n_i; ++i) {
    Matrix k(d_q, d_r);
    for (int row = 0; row < d_q; ++row) {
      for (int col = 0; col < d_r; ++col) {
        k(row, col) = Complex(gauss(rng), gauss(rng));
      }
    }
    kraus.push_back(k);
    gram += k.adjoint() * k;
  }
  const EigResult eig = eig_hermitian(gram);
  Vector inv(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    inv(k) = 1.0 / std::sqrt(std::max(eig.eigenvalues(k), 1e-12));
  }
  const Matrix t = eig.eigenvectors * inv.asDiagonal() *
                   eig.eigenvectors.adjoint();
  std::vector<ChoiMap> instrument;
  for (Matrix& k : kraus) instrument.push_back(kraus_to_choi(k * t));
  return instrument;
}

}  // namespace

StrategyValue pguess_seesaw(const Pmd& pmd, const GuessingGame& game,
                            const SeesawOptions& opts) {
  require_valid(pmd);
  require_valid(game.ensemble);
  const Ensemble& ens = game.ensemble;
  const int d_r = ens.dim;
  const int d_q = pmd.dim;
  const int n_i = (opts.instrument_outcomes > 0)
                      ? opts.instrument_outcomes
                      : pmd.n_programs() * ens.n_answers();

  Rng rng(opts.seed);
  StrategyValue best;
  best.value = -std::numeric_limits<double>::infinity();
  best.lower_bound_only = true;

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    std::vector<ChoiMap> instrument;
    if (restart == 0 && d_r == d_q) {
      instrument = identity_padded_instrument(d_r, n_i);
    } else if (restart == 0 || (restart == 1 && d_r != d_q)) {
      instrument = subspace_instrument(d_r, d_q, n_i);
    } else {
      instrument = random_instrument(d_r, d_q, n_i, rng);
    }

    SeesawStrategy strategy;
    double value = seesaw_classical_step(instrument, pmd, ens, strategy);
    bool converged = false;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
      std::vector<ChoiMap> updated;
      try {
        updated = seesaw_instrument_step(strategy, pmd, ens, n_i, opts.solver);
      } catch (const NumericalError&) {
        break;  // keep the best value found on this restart
      }
      const double improved =
          seesaw_classical_step(updated, pmd, ens, strategy);
      instrument = std::move(updated);
      if (improved <= value + opts.improve_tol) {
        value = std::max(value, improved);
        converged = true;
        break;
      }
      value = improved;
    }

    if (value > best.value) {
      best.value = value;
      best.converged = converged;
      // response device N(z|w) induced by the final strategy
      Pmd response;
      response.dim = d_r;
      response.programs = ens.post_info;
      response.outcomes = ens.answers;
      response.effects.assign(
          static_cast<std::size_t>(ens.n_post_info()) * ens.n_answers(),
          Matrix::Zero(d_r, d_r));
      for (int i = 0; i < n_i; ++i) {
        for (int w = 0; w < ens.n_post_info(); ++w) {
          const int x =
              strategy.program[static_cast<std::size_t>(i) * ens.n_post_info() +
                               w];
          const auto& answers =
              strategy
                  .answers[static_cast<std::size_t>(i) * ens.n_post_info() + w];
          for (int a = 0; a < pmd.n_outcomes(); ++a) {
            response.effect(answers[a], w) +=
                adjoint_apply(instrument[i], pmd.effect(a, x));
          }
        }
      }
      best.response = std::move(response);
    }
  }
  return best;
}

WitnessOutcome incompatibility_witness_check(const Pmd& pmd,
                                             const WitnessCheckOptions& opts) {
  require_valid(pmd);
  WitnessOutcome out;
  const auto compat = jointmeas::check_simple(pmd);
  if (!compat.is_simple) {
    const auto dual = robustness::dual(pmd);
    GuessingGame game = robustness::witness_to_game(dual.witness);
    double direct = 0.0;
    for (int x = 0; x < pmd.n_programs(); ++x) {
      for (int a = 0; a < pmd.n_outcomes(); ++a) {
        direct +=
            (pmd.effect(a, x) * game.ensemble.state(x, a)).trace().real();
      }
    }
    const double benchmark = pguess_simple(game).value;
    out.incompatible = true;
    out.margin = direct - benchmark;
    out.game = std::move(game);
    return out;
  }

  Rng rng(opts.seed);
  out.incompatible = false;
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.sample_games; ++k) {
    GuessingGame game{random_ensemble(pmd.dim, pmd.n_programs(),
                                      pmd.n_outcomes(), rng)};
    const double payoff = pguess_classical(pmd, game).value;
    const double benchmark = pguess_simple(game).value;
    out.max_excess = std::max(out.max_excess, payoff - benchmark);
  }
  return out;
}

}  // namespace pmdkit::games
