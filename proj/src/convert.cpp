#include "pmdkit/convert.hpp"

#include "pmdkit/jointmeas.hpp"
#include "pmdkit/robustness.hpp"
#include "pmdkit/sampling.hpp"
#include "pmdkit/simplex.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pmdkit::convert {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Convertible:
      return "convertible";
    case Verdict::NotConvertibleClassical:
      return "not_convertible_classical";
    case Verdict::Undecided:
      return "undecided";
  }
  return "unknown";
}

namespace {

int digit(long long code, int position, int base) {
  for (int k = 0; k < position; ++k) code /= base;
  return static_cast<int>(code % base);
}

// N_d(b|y) = sum_a [g(a,y)=b] M(a|f(y)) for the deterministic strategy
// d = (f, g) with f(y) = digit y of fidx (base |X|) and g(a,y) = digit
// (y*|A|+a) of gidx (base |B|).
Pmd candidate_pmd(const Pmd& src, long long fidx, long long gidx,
                  const std::vector<std::string>& programs,
                  const std::vector<std::string>& outcomes) {
  const int n_a = src.n_outcomes();
  const int n_x = src.n_programs();
  const int n_y = static_cast<int>(programs.size());
  const int n_b = static_cast<int>(outcomes.size());
  Pmd out;
  out.dim = src.dim;
  out.programs = programs;
  out.outcomes = outcomes;
  out.effects.assign(static_cast<std::size_t>(n_y) * n_b,
                     Matrix::Zero(src.dim, src.dim));
  for (int y = 0; y < n_y; ++y) {
    const int x = digit(fidx, y, n_x);
    for (int a = 0; a < n_a; ++a) {
      const int b = digit(gidx, y * n_a + a, n_b);
      out.effect(b, y) += src.effect(a, x);
    }
  }
  return out;
}

FreeOperation protocol_from_strategies(
    const Pmd& src, const Pmd& dst,
    const std::vector<std::pair<long long, double>>& weighted) {
  const int n_x = src.n_programs();
  const int n_a = src.n_outcomes();
  const int n_y = dst.n_programs();
  const int n_b = dst.n_outcomes();
  const int n_r = static_cast<int>(weighted.size());
  const long long n_g = [&] {
    long long v = 1;
    for (int k = 0; k < n_a * n_y; ++k) v *= n_b;
    return v;
  }();

  FreeOperation op;
  op.target_programs = dst.programs;
  op.target_outcomes = dst.outcomes;
  std::vector<long long> f_codes(n_r), g_codes(n_r);
  for (int r = 0; r < n_r; ++r) {
    op.randomness.push_back(weighted[r].second);
    op.instruments.push_back({identity_choi(src.dim)});
    f_codes[r] = weighted[r].first / n_g;
    g_codes[r] = weighted[r].first % n_g;
  }
  op.pre = ClassicalChannel::deterministic(
      {1, n_y, n_r}, n_x, [&](const std::vector<int>& in) {
        return digit(f_codes[in[2]], in[1], n_x);
      });
  op.post = ClassicalChannel::deterministic(
      {n_a, n_x, 1, n_y, n_r}, n_b, [&](const std::vector<int>& in) {
        return digit(g_codes[in[4]], in[3] * n_a + in[0], n_b);
      });
  return op;
}

GuessingGame game_from_shifted_operators(const std::vector<Matrix>& y_ops,
                                         const Pmd& dst) {
  const int n_y = dst.n_programs();
  const int n_b = dst.n_outcomes();
  const int d = dst.dim;
  double max_abs_eig = 0.0;
  double trace_sum = 0.0;
  for (const Matrix& y : y_ops) {
    const EigResult eig = eig_hermitian(y);
    max_abs_eig = std::max(max_abs_eig, eig.eigenvalues.cwiseAbs().maxCoeff());
    trace_sum += y.trace().real();
  }
  const double c = max_abs_eig + 1.0;
  const double total = trace_sum + n_y * n_b * d * c;
  Ensemble ens;
  ens.dim = d;
  ens.post_info = dst.programs;
  ens.answers = dst.outcomes;
  for (int y = 0; y < n_y; ++y) {
    for (int b = 0; b < n_b; ++b) {
      ens.states.push_back(
          (y_ops[static_cast<std::size_t>(y) * n_b + b] +
           c * Matrix::Identity(d, d)) /
          total);
    }
  }
  return GuessingGame{std::move(ens)};
}

double target_payoff(const Pmd& dst, const GuessingGame& game) {
  double payoff = 0.0;
  for (int y = 0; y < dst.n_programs(); ++y) {
    for (int b = 0; b < dst.n_outcomes(); ++b) {
      payoff +=
          (dst.effect(b, y) * game.ensemble.state(y, b)).trace().real();
    }
  }
  return payoff;
}

}  // namespace

ConversionCertificate convertibility_lp(const Pmd& src, const Pmd& dst) {
  require_valid(src);
  require_valid(dst);
  if (src.dim != dst.dim) {
    throw DimensionError(
        "convertibility_lp: source and target dimensions differ");
  }
  const int n_x = src.n_programs();
  const int n_a = src.n_outcomes();
  const int n_y = dst.n_programs();
  const int n_b = dst.n_outcomes();
  const int d = src.dim;

  long long n_f = 1;
  for (int y = 0; y < n_y; ++y) {
    n_f *= n_x;
    if (n_f > kMaxStrategies) break;
  }
  long long n_g = 1;
  for (int k = 0; k < n_a * n_y; ++k) {
    n_g *= n_b;
    if (n_g > kMaxStrategies) break;
  }
  if (n_f > kMaxStrategies || n_g > kMaxStrategies ||
      n_f * n_g > kMaxStrategies) {
    std::ostringstream os;
    os << "strategy enumeration needs " << n_f << " x " << n_g
       << " deterministic processings, above the limit of " << kMaxStrategies;
    throw InvalidInputError(os.str());
  }
  const long long n_strategies = n_f * n_g;

  const auto basis = hermitian_basis(d);
  const int d2 = d * d;
  const int rows = n_y * n_b * d2 + 1;

  Eigen::MatrixXd a(rows, n_strategies);
  for (long long s = 0; s < n_strategies; ++s) {
    const Pmd cand =
        candidate_pmd(src, s / n_g, s % n_g, dst.programs, dst.outcomes);
    int row = 0;
    for (int y = 0; y < n_y; ++y) {
      for (int b = 0; b < n_b; ++b) {
        for (int k = 0; k < d2; ++k) {
          a(row++, s) = (basis[k] * cand.effect(b, y)).trace().real();
        }
      }
    }
    a(row, s) = 1.0;
  }
  RealVector rhs(rows);
  {
    int row = 0;
    for (int y = 0; y < n_y; ++y) {
      for (int b = 0; b < n_b; ++b) {
        for (int k = 0; k < d2; ++k) {
          rhs(row++) = (basis[k] * dst.effect(b, y)).trace().real();
        }
      }
    }
    rhs(row) = 1.0;
  }

  const detail::LpFeasibilityResult lp = detail::lp_feasible(a, rhs, 1e-9);

  ConversionCertificate cert;
  if (lp.feasible) {
    std::vector<std::pair<long long, double>> weighted;
    double mass = 0.0;
    for (long long s = 0; s < n_strategies; ++s) {
      if (lp.solution(s) > 1e-12) {
        weighted.push_back({s, lp.solution(s)});
        mass += lp.solution(s);
      }
    }
    for (auto& [s, wgt] : weighted) wgt /= mass;
    FreeOperation protocol = protocol_from_strategies(src, dst, weighted);
    const Pmd reproduced = apply_free_operation(protocol, src);
    cert.protocol_error = max_effect_distance(reproduced, dst);
    if (cert.protocol_error > kProtocolTol) {
      throw NumericalError(
          "convertibility protocol failed re-verification: error " +
          std::to_string(cert.protocol_error));
    }
    cert.verdict = Verdict::Convertible;
    cert.protocol = std::move(protocol);
    return cert;
  }

  // Farkas ray -> separating operators -> witness game
  std::vector<Matrix> y_ops;
  for (int y = 0; y < n_y; ++y) {
    for (int b = 0; b < n_b; ++b) {
      Matrix op = Matrix::Zero(d, d);
      for (int k = 0; k < d2; ++k) {
        op += lp.farkas((static_cast<Eigen::Index>(y) * n_b + b) * d2 + k) *
              basis[k];
      }
      y_ops.push_back(std::move(op));
    }
  }
  GuessingGame game = game_from_shifted_operators(y_ops, dst);
  cert.margin =
      target_payoff(dst, game) - games::pguess_classical(src, game).value;
  cert.verdict = Verdict::NotConvertibleClassical;
  cert.witness_game = std::move(game);
  return cert;
}

FreeOperation simple_interconvert(const SimpleDecomposition& src_dec,
                                  const SimpleDecomposition& dst_dec) {
  for (const auto* dec : {&src_dec, &dst_dec}) {
    const ValidationReport report = validate_decomposition(*dec);
    if (!report.ok()) {
      throw InvalidInputError("invalid decomposition: " + report.summary());
    }
  }
  const Pmd src = jointmeas::reconstruct(src_dec);
  const Pmd dst = jointmeas::reconstruct(dst_dec);
  const int d_src = src.dim;
  const int d_dst = dst.dim;
  const int n_i = dst_dec.parent.outcomes();
  const int n_x = src.n_programs();
  const int n_a = src.n_outcomes();
  const int n_y = dst.n_programs();
  const int n_b = dst.n_outcomes();

  // Destructive pre-processing: measure the target's parent POVM on the
  // incoming system and hand the source device a fixed state; the
  // source's outcome is then ignored and the parent outcome is
  // post-processed with the target's own relabeling.
  FreeOperation op;
  op.randomness = {1.0};
  const Matrix sigma0 = Matrix::Identity(d_src, d_src) / d_src;
  std::vector<ChoiMap> instrument;
  for (int i = 0; i < n_i; ++i) {
    instrument.emplace_back(
        d_dst, d_src,
        kron(dst_dec.parent.effects[i].transpose(), sigma0));
  }
  op.instruments.push_back(std::move(instrument));
  op.target_programs = dst.programs;
  op.target_outcomes = dst.outcomes;
  op.pre = ClassicalChannel::deterministic(
      {n_i, n_y, 1}, n_x, [](const std::vector<int>&) { return 0; });
  ClassicalChannel post;
  post.input_sizes = {n_a, n_x, n_i, n_y, 1};
  post.output_size = n_b;
  post.table.resize(static_cast<std::size_t>(post.joint_inputs()) * n_b);
  for (int a = 0; a < n_a; ++a) {
    for (int x = 0; x < n_x; ++x) {
      for (int i = 0; i < n_i; ++i) {
        for (int y = 0; y < n_y; ++y) {
          const std::size_t row =
              static_cast<std::size_t>(post.joint_index({a, x, i, y, 0}));
          for (int b = 0; b < n_b; ++b) {
            post.table[row * n_b + b] = dst_dec.post_prob(b, i, y);
          }
        }
      }
    }
  }
  op.post = std::move(post);

  const Pmd reproduced = apply_free_operation(op, src);
  const double error = max_effect_distance(reproduced, dst);
  if (error > kProtocolTol) {
    throw NumericalError(
        "simple interconversion failed re-verification: error " +
        std::to_string(error));
  }
  return op;
}

ConversionCertificate refute_by_game_search(const Pmd& src, const Pmd& dst,
                                            const RefuteOptions& opts) {
  require_valid(src);
  require_valid(dst);
  const bool exact_classical = (src.dim == dst.dim);
  const int n_y = dst.n_programs();
  const int n_b = dst.n_outcomes();

  Rng rng(opts.seed);
  std::vector<GuessingGame> starts;
  // witness game of the target's own incompatibility, when available
  try {
    if (!jointmeas::check_simple(dst).is_simple) {
      starts.push_back(
          robustness::witness_to_game(robustness::dual(dst).witness));
    }
  } catch (const InvalidInputError&) {
    // oversized parametrization; random starts only
  }
  // Farkas-seeded start from the classical-processing decision when the
  // enumeration is small enough to be cheap
  if (exact_classical) {
    long long strategies = 1;
    for (int y = 0; y < n_y && strategies <= 4096; ++y) {
      strategies *= src.n_programs();
    }
    for (int k = 0; k < src.n_outcomes() * n_y && strategies <= 4096; ++k) {
      strategies *= n_b;
    }
    if (strategies <= 4096) {
      const ConversionCertificate lp = convertibility_lp(src, dst);
      if (lp.verdict == Verdict::NotConvertibleClassical &&
          lp.witness_game.has_value()) {
        starts.push_back(*lp.witness_game);
      }
    }
  }
  while (static_cast<int>(starts.size()) < std::max(1, opts.restarts)) {
    starts.push_back(GuessingGame{random_ensemble(dst.dim, n_y, n_b, rng)});
  }

  ConversionCertificate cert;
  cert.margin = -std::numeric_limits<double>::infinity();
  GuessingGame best_game = starts.front();

  for (GuessingGame game : starts) {
    for (int iter = 0; iter < opts.ascent_iters; ++iter) {
      games::SeesawOptions sopts = opts.seesaw;
      sopts.seed = opts.seed + 1000 * iter + 7;
      const games::StrategyValue bound = games::pguess_seesaw(src, game, sopts);
      const double phi = target_payoff(dst, game) - bound.value;
      if (phi > cert.margin) {
        cert.margin = phi;
        best_game = game;
      }
      if (!bound.response.has_value()) break;

      // steepest payoff-difference direction: put weight on the top
      // eigenvector of dst(b|y) - response(b|y)
      const Pmd& response = *bound.response;
      double top = -std::numeric_limits<double>::infinity();
      int top_y = 0, top_b = 0;
      Vector top_vec;
      for (int y = 0; y < n_y; ++y) {
        for (int b = 0; b < n_b; ++b) {
          const EigResult eig =
              eig_hermitian(dst.effect(b, y) - response.effect(b, y));
          const double lmax = eig.eigenvalues(eig.eigenvalues.size() - 1);
          if (lmax > top) {
            top = lmax;
            top_y = y;
            top_b = b;
            top_vec = eig.eigenvectors.col(eig.eigenvalues.size() - 1);
          }
        }
      }
      const double beta = 0.5;
      Ensemble next = game.ensemble;
      for (Matrix& s : next.states) s *= (1.0 - beta);
      next.state(top_y, top_b) += beta * (top_vec * top_vec.adjoint());
      game.ensemble = std::move(next);
    }
  }

  if (cert.margin > kMarginTol) {
    // A margin against the see-saw bound implies one against the exact
    // classical optimum, so the classical-class refutation is sound on
    // equal dimensions; across dimensions only the heuristic bound
    // exists and the candidate is reported without a verdict.
    cert.witness_game = best_game;
    cert.verdict = exact_classical ? Verdict::NotConvertibleClassical
                                   : Verdict::Undecided;
  } else {
    cert.verdict = Verdict::Undecided;
  }
  return cert;
}

}  // namespace pmdkit::convert
