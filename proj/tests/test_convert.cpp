#include "pmdkit/convert.hpp"

#include "pmdkit/jointmeas.hpp"
#include "pmdkit/sampling.hpp"
#include "pmdkit/simplex.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace pmdkit;
using namespace pmdkit::convert;

namespace {

Pmd trivial_pmd_on(int dim) {
  Pmd pmd;
  pmd.dim = dim;
  pmd.programs = {"y0"};
  pmd.outcomes = {"b0"};
  pmd.effects = {Matrix::Identity(dim, dim)};
  return pmd;
}

SimpleDecomposition trivial_decomposition(int dim) {
  SimpleDecomposition dec;
  dec.parent.effects = {Matrix::Identity(dim, dim)};
  dec.programs = {"y0"};
  dec.outcomes = {"b0"};
  dec.post = {1.0};
  return dec;
}

}  // namespace

TEST_SUITE_BEGIN("convert");

TEST_CASE("phase-1 simplex: feasible and infeasible systems") {
  // x0 + x1 = 1, x0 - x1 = 0 -> x = (1/2, 1/2)
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, -1;
  RealVector b(2);
  b << 1, 0;
  const auto feas = detail::lp_feasible(a, b);
  REQUIRE(feas.feasible);
  CHECK((a * feas.solution - b).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(feas.solution.minCoeff() >= 0.0);

  // x0 + x1 = -1 has no nonnegative solution
  RealVector b2(2);
  b2 << -1, 0;
  const auto infeas = detail::lp_feasible(a, b2);
  REQUIRE(!infeas.feasible);
  const RealVector ray = infeas.farkas;
  CHECK(ray.dot(b2) == doctest::Approx(1.0));
  CHECK((a.transpose() * ray).maxCoeff() <= 1e-9);
}

TEST_CASE("self-conversion is recovered by the LP") {
  Rng rng(3);
  const Pmd pmd = random_pmd(2, 2, 2, rng);
  const auto cert = convertibility_lp(pmd, pmd);
  REQUIRE(cert.verdict == Verdict::Convertible);
  REQUIRE(cert.protocol.has_value());
  CHECK(cert.protocol_error <= 1e-6);
  CHECK(max_effect_distance(apply_free_operation(*cert.protocol, pmd), pmd) <=
        1e-6);
}

TEST_CASE("program swap is a classical conversion") {
  const Pmd sharp = noisy_mub_pmd(1.0, 2);
  Pmd swapped = sharp;
  for (int a = 0; a < 2; ++a) {
    std::swap(swapped.effect(a, 0), swapped.effect(a, 1));
  }
  const auto cert = convertibility_lp(sharp, swapped);
  CHECK(cert.verdict == Verdict::Convertible);
}

TEST_CASE("random strategy mixtures are recovered by the LP") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Pmd src = random_pmd(2, 2, 2, rng);
    // random mixture of deterministic processings of src
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick_x(0, 1);
    Pmd dst;
    dst.dim = 2;
    dst.programs = {"y0", "y1"};
    dst.outcomes = {"b0", "b1"};
    dst.effects.assign(4, Matrix::Zero(2, 2));
    double w1 = unif(rng);
    for (int part = 0; part < 2; ++part) {
      const double w = (part == 0) ? w1 : 1.0 - w1;
      std::vector<int> f{pick_x(rng), pick_x(rng)};
      std::vector<int> g{pick_x(rng), pick_x(rng), pick_x(rng), pick_x(rng)};
      for (int y = 0; y < 2; ++y) {
        for (int a = 0; a < 2; ++a) {
          dst.effect(g[y * 2 + a], y) += w * src.effect(a, f[y]);
        }
      }
    }
    const auto cert = convertibility_lp(src, dst);
    REQUIRE(cert.verdict == Verdict::Convertible);
    CHECK(cert.protocol_error <= 1e-6);
  }
}

TEST_CASE("the trivial device cannot reach an incompatible one") {
  const Pmd trivial = trivial_pmd_on(2);
  const Pmd sharp = noisy_mub_pmd(1.0, 2);
  const auto cert = convertibility_lp(trivial, sharp);
  REQUIRE(cert.verdict == Verdict::NotConvertibleClassical);
  REQUIRE(cert.witness_game.has_value());
  CHECK(cert.margin > 1e-7);
  CHECK(validate_ensemble(cert.witness_game->ensemble).ok());
}

TEST_CASE("simple interconversion: identity round trip") {
  Rng rng(11);
  const auto sample = random_simple_pmd(2, 2, 2, 3, rng);
  const FreeOperation op =
      simple_interconvert(sample.decomposition, sample.decomposition);
  const Pmd out = apply_free_operation(op, sample.pmd);
  CHECK(max_effect_distance(out, sample.pmd) <= 1e-6);
}

TEST_CASE("simple interconversion: collapse to the trivial device") {
  Rng rng(13);
  const auto sample = random_simple_pmd(2, 2, 2, 3, rng);
  const FreeOperation op =
      simple_interconvert(sample.decomposition, trivial_decomposition(2));
  const Pmd out = apply_free_operation(op, sample.pmd);
  CHECK(max_effect_distance(out, trivial_pmd_on(2)) <= 1e-6);
}

TEST_CASE("simple interconversion: trivial device to a random qutrit target") {
  Rng rng(17);
  const auto target = random_simple_pmd(3, 2, 3, 4, rng);
  const FreeOperation op =
      simple_interconvert(trivial_decomposition(1), target.decomposition);
  const Pmd out = apply_free_operation(op, trivial_pmd_on(1));
  CHECK(max_effect_distance(out, target.pmd) <= 1e-6);
}

TEST_CASE("simple interconversion works in both directions on random pairs") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p1 = random_simple_pmd(2, 2, 2, 3, rng);
    const auto p2 = random_simple_pmd(3, 2, 2, 4, rng);
    const FreeOperation fwd =
        simple_interconvert(p1.decomposition, p2.decomposition);
    CHECK(max_effect_distance(apply_free_operation(fwd, p1.pmd), p2.pmd) <=
          1e-6);
    const FreeOperation back =
        simple_interconvert(p2.decomposition, p1.decomposition);
    CHECK(max_effect_distance(apply_free_operation(back, p2.pmd), p1.pmd) <=
          1e-6);
  }
}

TEST_CASE("game search finds no margin against an honestly derived target") {
  Rng rng(23);
  const Pmd src = noisy_mub_pmd(0.9, 2);
  const FreeOperation op = random_free_operation(2, 2, 2, 2, 2, 2, 2, 2, rng);
  const Pmd dst = apply_free_operation(op, src);
  RefuteOptions opts;
  opts.restarts = 3;
  opts.ascent_iters = 10;
  const auto cert = refute_by_game_search(src, dst, opts);
  CHECK(cert.margin <= 1e-7);
  CHECK(cert.verdict == Verdict::Undecided);
}

TEST_CASE("game search refutes: simple source, incompatible target") {
  Rng rng(29);
  const auto simple_src = random_simple_pmd(2, 2, 2, 3, rng);
  const Pmd dst = noisy_mub_pmd(0.95, 2);
  RefuteOptions opts;
  opts.restarts = 3;
  opts.ascent_iters = 8;
  const auto cert = refute_by_game_search(simple_src.pmd, dst, opts);
  REQUIRE(cert.verdict == Verdict::NotConvertibleClassical);
  CHECK(cert.margin > 1e-7);
  REQUIRE(cert.witness_game.has_value());
  // soundness: recompute both sides of the certificate
  double payoff = 0.0;
  for (int y = 0; y < 2; ++y) {
    for (int b = 0; b < 2; ++b) {
      payoff += (dst.effect(b, y) * cert.witness_game->ensemble.state(y, b))
                    .trace()
                    .real();
    }
  }
  CHECK(payoff - games::pguess_classical(simple_src.pmd, *cert.witness_game)
                     .value >=
        cert.margin - 1e-9);
}

TEST_CASE("game search finds no margin between random simple devices") {
  // the constructive route exists instead (simple_interconvert)
  Rng rng(41);
  const auto p1 = random_simple_pmd(2, 2, 2, 3, rng);
  const auto p2 = random_simple_pmd(2, 2, 2, 3, rng);
  RefuteOptions opts;
  opts.restarts = 2;
  opts.ascent_iters = 6;
  const auto cert = refute_by_game_search(p1.pmd, p2.pmd, opts);
  CHECK(cert.margin <= 1e-7);
  CHECK(cert.verdict == Verdict::Undecided);
  CHECK_NOTHROW(simple_interconvert(p1.decomposition, p2.decomposition));
}

TEST_CASE("transitivity: composed protocols convert end to end") {
  Rng rng(31);
  const Pmd src = random_pmd(2, 2, 2, rng);
  // two deterministic processings chained
  const auto c1 = convertibility_lp(src, src);
  REQUIRE(c1.verdict == Verdict::Convertible);
  const Pmd mid = apply_free_operation(*c1.protocol, src);
  const auto c2 = convertibility_lp(mid, mid);
  REQUIRE(c2.verdict == Verdict::Convertible);
  const FreeOperation comp =
      compose_free_operations(*c2.protocol, *c1.protocol);
  CHECK(max_effect_distance(apply_free_operation(comp, src), src) <= 1e-6);
}

TEST_CASE("oversized strategy enumerations are refused") {
  Rng rng(37);
  const Pmd src = random_pmd(2, 2, 4, rng);
  const Pmd dst = random_pmd(2, 4, 4, rng);
  // |B|^(|A||Y|) = 4^16 blows the guard
  CHECK_THROWS_AS(convertibility_lp(src, dst), InvalidInputError);
}

TEST_SUITE_END();
