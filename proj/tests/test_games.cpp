#include "pmdkit/games.hpp"

#include "pmdkit/sampling.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace pmdkit;
using namespace pmdkit::games;

namespace {

// Exact optimum over single-qubit projective (or trivial) measurements
// followed by per-w relabeling, for two-answer qubit games: each
// relabeling combo contributes A + |v|/2 with A, v linear in the states.
double projective_relabel_oracle(const Ensemble& ens) {
  REQUIRE(ens.dim == 2);
  REQUIRE(ens.n_answers() == 2);
  const int n_w = ens.n_post_info();
  auto bloch = [](const Matrix& rho) {
    return Eigen::Vector3d((rho * testing::pauli_x()).trace().real(),
                           (rho * testing::pauli_y()).trace().real(),
                           (rho * testing::pauli_z()).trace().real());
  };
  double best = 0.0;
  const int combos = 1 << (2 * n_w);  // 4 relabelings per w
  for (int c = 0; c < combos; ++c) {
    double trace_sum = 0.0;
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int w = 0; w < n_w; ++w) {
      const int z0 = (c >> (2 * w)) & 1;        // answer declared on outcome 0
      const int z1 = (c >> (2 * w + 1)) & 1;    // answer declared on outcome 1
      trace_sum += ens.state(w, z0).trace().real() +
                   ens.state(w, z1).trace().real();
      v += bloch(ens.state(w, z0)) - bloch(ens.state(w, z1));
    }
    best = std::max(best, 0.5 * trace_sum + 0.5 * v.norm());
  }
  return best;
}

GuessingGame answer_revealed_game() {
  // z is a fixed function of w: the post-information gives the answer away
  Ensemble ens;
  ens.dim = 2;
  ens.post_info = {"w0", "w1"};
  ens.answers = {"z0", "z1"};
  ens.states = {0.25 * Matrix::Identity(2, 2), Matrix::Zero(2, 2),
                Matrix::Zero(2, 2), 0.25 * Matrix::Identity(2, 2)};
  return GuessingGame{ens};
}

GuessingGame uniform_game(int n_w, int n_z) {
  Ensemble ens;
  ens.dim = 2;
  for (int w = 0; w < n_w; ++w) ens.post_info.push_back("w" + std::to_string(w));
  for (int z = 0; z < n_z; ++z) ens.answers.push_back("z" + std::to_string(z));
  ens.states.assign(static_cast<std::size_t>(n_w) * n_z,
                    Matrix::Identity(2, 2) / (2.0 * n_w * n_z));
  return GuessingGame{ens};
}

}  // namespace

TEST_SUITE_BEGIN("games");

TEST_CASE("classical evaluator: answer revealed by the post-information") {
  Rng rng(3);
  const Pmd pmd = random_pmd(2, 2, 2, rng);
  const auto sv = pguess_classical(pmd, answer_revealed_game());
  CHECK(sv.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("classical evaluator: informationless states give the random floor") {
  Rng rng(5);
  const Pmd pmd = random_pmd(2, 2, 3, rng);
  const auto sv = pguess_classical(pmd, uniform_game(2, 4));
  CHECK(sv.value == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("classical evaluator: conjugate-coding game with the sharp device") {
  const auto sv = pguess_classical(noisy_mub_pmd(1.0, 2), bb84_game());
  CHECK(sv.value == doctest::Approx(1.0).epsilon(1e-10));
  // strategy measures in the announced basis
  REQUIRE(sv.classical.has_value());
  CHECK(sv.classical->program_for_post_info[0] == 0);
  CHECK(sv.classical->program_for_post_info[1] == 1);
}

TEST_CASE("classical strategy value re-evaluates through its response device") {
  Rng rng(7);
  const Pmd pmd = random_pmd(2, 2, 2, rng);
  const GuessingGame game{random_ensemble(2, 3, 2, rng)};
  const auto sv = pguess_classical(pmd, game);
  REQUIRE(sv.response.has_value());
  double payoff = 0.0;
  for (int w = 0; w < game.ensemble.n_post_info(); ++w) {
    for (int z = 0; z < game.ensemble.n_answers(); ++z) {
      payoff += (game.ensemble.state(w, z) * sv.response->effect(z, w))
                    .trace()
                    .real();
    }
  }
  CHECK(payoff == doctest::Approx(sv.value).epsilon(1e-10));
  CHECK(validate_pmd(*sv.response).ok());
}

TEST_CASE("simple benchmark: answer-revealed game reaches 1") {
  const auto sv = pguess_simple(answer_revealed_game());
  CHECK(sv.value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("simple benchmark: single post-info label reduces to discrimination") {
  // two equiprobable pure states with overlap c
  for (double angle : {0.3, 0.7, 1.2}) {
    Ensemble ens;
    ens.dim = 2;
    ens.post_info = {"w0"};
    ens.answers = {"z0", "z1"};
    Vector psi0(2), psi1(2);
    psi0 << 1.0, 0.0;
    psi1 << std::cos(angle), std::sin(angle);
    ens.states = {0.5 * (psi0 * psi0.adjoint()), 0.5 * (psi1 * psi1.adjoint())};
    const double c = std::abs(std::cos(angle));
    const double expected = 0.5 * (1.0 + std::sqrt(1.0 - c * c));
    const auto sv = pguess_simple(GuessingGame{ens});
    CHECK(sv.value == doctest::Approx(expected).epsilon(1e-7));
    CHECK(projective_relabel_oracle(ens) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("simple benchmark: conjugate-coding value matches the closed form") {
  const GuessingGame game = bb84_game();
  const auto sv = pguess_simple(game);
  const double expected = (2.0 + std::sqrt(2.0)) / 4.0;
  CHECK(sv.value == doctest::Approx(expected).epsilon(1e-7));
  // cross-check against the exhaustive projective-relabel search
  CHECK(std::abs(sv.value - projective_relabel_oracle(game.ensemble)) <= 1e-6);
  // returned function POVM is a valid POVM
  Matrix total = Matrix::Zero(2, 2);
  for (const Matrix& t : sv.function_povm) {
    CHECK(psd_check(t, 1e-7).is_psd);
    total += t;
  }
  CHECK((total - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("simple benchmark is invariant under relabeling") {
  Rng rng(11);
  Ensemble ens = random_ensemble(2, 2, 2, rng);
  const double base = pguess_simple(GuessingGame{ens}).value;

  Ensemble swapped_w = ens;
  std::swap(swapped_w.post_info[0], swapped_w.post_info[1]);
  for (int z = 0; z < 2; ++z) {
    std::swap(swapped_w.state(0, z), swapped_w.state(1, z));
  }
  CHECK(pguess_simple(GuessingGame{swapped_w}).value ==
        doctest::Approx(base).epsilon(1e-7));

  Ensemble swapped_z = ens;
  std::swap(swapped_z.answers[0], swapped_z.answers[1]);
  for (int w = 0; w < 2; ++w) {
    std::swap(swapped_z.state(w, 0), swapped_z.state(w, 1));
  }
  CHECK(pguess_simple(GuessingGame{swapped_z}).value ==
        doctest::Approx(base).epsilon(1e-7));
}

TEST_CASE("see-saw dominates the classical value on matching dimensions") {
  Rng rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    const Pmd pmd = random_pmd(2, 2, 2, rng);
    const GuessingGame game{random_ensemble(2, 2, 2, rng)};
    const double classical = pguess_classical(pmd, game).value;
    SeesawOptions opts;
    opts.restarts = 2;
    opts.seed = 17 + trial;
    const auto sv = pguess_seesaw(pmd, game, opts);
    CHECK(sv.lower_bound_only);
    CHECK(sv.value >= classical - 1e-9);
    CHECK(sv.value <= 1.0 + 1e-9);
    CHECK(sv.value >= 1.0 / game.ensemble.n_answers() - 1e-9);
  }
}

TEST_CASE("see-saw bridges a dimension mismatch through an isometry") {
  // the conjugate-coding game embedded into a qutrit space
  const GuessingGame qubit_game = bb84_game();
  Ensemble embedded;
  embedded.dim = 3;
  embedded.post_info = qubit_game.ensemble.post_info;
  embedded.answers = qubit_game.ensemble.answers;
  for (const Matrix& s : qubit_game.ensemble.states) {
    Matrix big = Matrix::Zero(3, 3);
    big.topLeftCorner(2, 2) = s;
    embedded.states.push_back(big);
  }
  const Pmd pmd = noisy_mub_pmd(1.0, 2);
  const double qubit_value = pguess_classical(pmd, qubit_game).value;
  SeesawOptions opts;
  opts.restarts = 2;
  const auto sv = pguess_seesaw(pmd, GuessingGame{embedded}, opts);
  CHECK(std::abs(sv.value - qubit_value) <= 1e-6);
}

TEST_CASE("witness check: incompatible device shows a strict advantage") {
  const auto outcome = incompatibility_witness_check(noisy_mub_pmd(0.8, 2));
  CHECK(outcome.incompatible);
  CHECK(outcome.margin > 1e-7);
  REQUIRE(outcome.game.has_value());
  CHECK(validate_ensemble(outcome.game->ensemble).ok());
}

TEST_CASE("witness check: sharp device wins the full ratio") {
  const Pmd sharp = noisy_mub_pmd(1.0, 2);
  const auto outcome = incompatibility_witness_check(sharp);
  REQUIRE(outcome.incompatible);
  REQUIRE(outcome.game.has_value());
  const double direct = [&] {
    double v = 0.0;
    for (int x = 0; x < 2; ++x) {
      for (int a = 0; a < 2; ++a) {
        v += (sharp.effect(a, x) * outcome.game->ensemble.state(x, a))
                 .trace()
                 .real();
      }
    }
    return v;
  }();
  const double benchmark = pguess_simple(*outcome.game).value;
  CHECK(direct / benchmark == doctest::Approx(1.171573).epsilon(1e-4));
}

TEST_CASE("witness check: simple device shows no advantage") {
  WitnessCheckOptions opts;
  opts.sample_games = 10;
  const auto outcome =
      incompatibility_witness_check(noisy_mub_pmd(0.5, 2), opts);
  CHECK(!outcome.incompatible);
  CHECK(outcome.max_excess <= 1e-7);
}

TEST_CASE("see-saw value is monotone in the iteration budget") {
  Rng rng(31);
  const Pmd pmd = random_pmd(2, 2, 2, rng);
  const GuessingGame game{random_ensemble(2, 2, 2, rng)};
  double previous = 0.0;
  for (int iters : {1, 2, 4, 8, 16}) {
    SeesawOptions opts;
    opts.restarts = 1;  // single deterministic seed, growing budget
    opts.seed = 41;
    opts.max_iters = iters;
    const double value = pguess_seesaw(pmd, game, opts).value;
    CHECK(value >= previous - 1e-9);
    CHECK(value <= 1.0 + 1e-9);
    previous = value;
  }
}

TEST_CASE("see-saw is reproducible for a fixed seed") {
  Rng rng(23);
  const Pmd pmd = random_pmd(2, 2, 2, rng);
  const GuessingGame game{random_ensemble(2, 2, 2, rng)};
  SeesawOptions opts;
  opts.restarts = 3;
  opts.seed = 99;
  const auto a = pguess_seesaw(pmd, game, opts);
  const auto b = pguess_seesaw(pmd, game, opts);
  CHECK(a.value == b.value);
}

TEST_SUITE_END();
