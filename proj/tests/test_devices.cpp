#include "pmdkit/devices.hpp"

#include "pmdkit/json_io.hpp"
#include "pmdkit/sampling.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace pmdkit;

namespace {

Pmd sharp_xz() { return noisy_mub_pmd(1.0, 2); }

// Direct four-index summation of the free-operation formula, kept
// independent of apply_free_operation's loop structure.
Pmd brute_force_apply(const FreeOperation& op, const Pmd& pmd) {
  const int n_y = static_cast<int>(op.target_programs.size());
  const int n_b = static_cast<int>(op.target_outcomes.size());
  Pmd out;
  out.dim = op.target_dim();
  out.programs = op.target_programs;
  out.outcomes = op.target_outcomes;
  out.effects.assign(static_cast<std::size_t>(n_y) * n_b,
                     Matrix::Zero(out.dim, out.dim));
  for (int b = 0; b < n_b; ++b) {
    for (int y = 0; y < n_y; ++y) {
      for (int r = 0; r < op.n_random(); ++r) {
        for (int i = 0; i < op.n_instrument_outcomes(); ++i) {
          for (int x = 0; x < pmd.n_programs(); ++x) {
            for (int a = 0; a < pmd.n_outcomes(); ++a) {
              // adjoint via Kraus operators, not via adjoint_apply
              Matrix lifted = Matrix::Zero(out.dim, out.dim);
              for (const Matrix& k : kraus_from_choi(op.instruments[r][i])) {
                lifted += k.adjoint() * pmd.effect(a, x) * k;
              }
              out.effect(b, y) += op.randomness[r] *
                                  op.post.prob({a, x, i, y, r}, b) *
                                  op.pre.prob({i, y, r}, x) * lifted;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("devices");

TEST_CASE("validate_pmd accepts the trivial half-half device") {
  Pmd pmd;
  pmd.dim = 2;
  pmd.programs = {"x0"};
  pmd.outcomes = {"a0", "a1"};
  pmd.effects = {0.5 * Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)};
  CHECK(validate_pmd(pmd).ok());
}

TEST_CASE("validate_pmd flags a completeness violation with its magnitude") {
  Pmd pmd;
  pmd.dim = 2;
  pmd.programs = {"x0"};
  pmd.outcomes = {"a0", "a1"};
  pmd.effects = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  const auto report = validate_pmd(pmd);
  REQUIRE(!report.ok());
  CHECK(report.issues[0].magnitude == doctest::Approx(1.0));
}

TEST_CASE("sharp X/Z projector device is valid") {
  const Pmd pmd = sharp_xz();
  CHECK(validate_pmd(pmd).ok());
  // projector algebra: effects are idempotent and orthogonal per program
  for (int x = 0; x < 2; ++x) {
    const Matrix& p = pmd.effect(0, x);
    const Matrix& q = pmd.effect(1, x);
    CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((p * q).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("identity operation leaves a PMD unchanged") {
  Rng rng(2);
  const Pmd pmd = random_pmd(2, 2, 3, rng);
  const Pmd out = apply_free_operation(identity_operation(pmd), pmd);
  CHECK(max_effect_distance(out, pmd) <= 1e-10);
}

TEST_CASE("discard-and-declare yields the trivial effect") {
  const Pmd pmd = sharp_xz();
  FreeOperation op = identity_operation(pmd);
  // post channel ignores a and always declares outcome 0
  op.post = ClassicalChannel::deterministic(op.post.input_sizes, 2,
                                            [](const std::vector<int>&) {
                                              return 0;
                                            });
  const Pmd out = apply_free_operation(op, pmd);
  for (int y = 0; y < out.n_programs(); ++y) {
    CHECK((out.effect(0, y) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          1e-10);
    CHECK(out.effect(1, y).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("random free operations match the brute-force summation oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const Pmd pmd = (trial % 2 == 0) ? sharp_xz() : random_pmd(2, 2, 2, rng);
    const FreeOperation op =
        random_free_operation(2, 2, 2, 3, 2, 3, 2, 2, rng);
    const Pmd out = apply_free_operation(op, pmd);
    CHECK(validate_pmd(out).ok());
    CHECK(max_effect_distance(out, brute_force_apply(op, pmd)) <= 1e-9);
  }
}

TEST_CASE("apply_free_operation is affine in the source device") {
  Rng rng(8);
  const Pmd m1 = random_pmd(2, 2, 2, rng);
  const Pmd m2 = random_pmd(2, 2, 2, rng);
  const FreeOperation op = random_free_operation(2, 2, 2, 2, 2, 2, 2, 3, rng);
  const double w = 0.3;
  const Pmd mixed = mix_pmds({w, 1 - w}, {m1, m2});
  const Pmd lhs = apply_free_operation(op, mixed);
  const Pmd rhs = mix_pmds(
      {w, 1 - w}, {apply_free_operation(op, m1), apply_free_operation(op, m2)});
  CHECK(max_effect_distance(lhs, rhs) <= 1e-10);
}

TEST_CASE("composition equals sequential application") {
  Rng rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Pmd pmd = random_pmd(2, 2, 2, rng);
    const FreeOperation first =
        random_free_operation(2, 2, 2, 3, 3, 2, 2, 2, rng);
    const FreeOperation second =
        random_free_operation(3, 3, 2, 2, 2, 3, 2, 2, rng);
    const Pmd sequential =
        apply_free_operation(second, apply_free_operation(first, pmd));
    const FreeOperation composed = compose_free_operations(second, first);
    const Pmd direct = apply_free_operation(composed, pmd);
    CHECK(max_effect_distance(sequential, direct) <= 1e-9);
  }
}

TEST_CASE("mix_pmds respects trivial weights") {
  Rng rng(14);
  const Pmd m1 = random_pmd(2, 2, 2, rng);
  const Pmd m2 = random_pmd(2, 2, 2, rng);
  CHECK(max_effect_distance(mix_pmds({1.0, 0.0}, {m1, m2}), m1) == 0.0);
  CHECK(max_effect_distance(mix_pmds({0.5, 0.5}, {m1, m1}), m1) <= 1e-15);
  CHECK(validate_pmd(mix_pmds({0.5, 0.5}, {m1, m2})).ok());
}

TEST_CASE("ensemble validation checks the joint trace distribution") {
  Rng rng(17);
  Ensemble ens = random_ensemble(2, 2, 2, rng);
  CHECK(validate_ensemble(ens).ok());
  ens.states[0] *= 2.0;
  CHECK(!validate_ensemble(ens).ok());
}

TEST_CASE("zero-trace ensemble members are permitted") {
  Ensemble ens;
  ens.dim = 2;
  ens.post_info = {"w0"};
  ens.answers = {"z0", "z1"};
  ens.states = {Matrix::Identity(2, 2) / 2.0, Matrix::Zero(2, 2)};
  CHECK(validate_ensemble(ens).ok());
}

TEST_CASE("PMD JSON round trip preserves the device") {
  Rng rng(20);
  const Pmd pmd = random_pmd(3, 2, 3, rng);
  const Pmd back = pmd_from_json(pmd_to_json(pmd));
  CHECK(back.programs == pmd.programs);
  CHECK(max_effect_distance(back, pmd) <= 1e-15);
  CHECK(validate_pmd(back).ok());
}

TEST_CASE("ensemble and free-operation JSON round trips") {
  Rng rng(23);
  const Ensemble ens = random_ensemble(2, 2, 3, rng);
  const Ensemble ens_back = ensemble_from_json(ensemble_to_json(ens));
  CHECK(validate_ensemble(ens_back).ok());
  for (std::size_t k = 0; k < ens.states.size(); ++k) {
    CHECK((ens.states[k] - ens_back.states[k]).cwiseAbs().maxCoeff() <= 1e-15);
  }

  const FreeOperation op = random_free_operation(2, 2, 2, 2, 2, 2, 2, 2, rng);
  const FreeOperation op_back =
      free_operation_from_json(free_operation_to_json(op));
  CHECK(validate_free_operation(op_back, 2, 2, 2).ok());
  const Pmd pmd = random_pmd(2, 2, 2, rng);
  CHECK(max_effect_distance(apply_free_operation(op, pmd),
                            apply_free_operation(op_back, pmd)) <= 1e-12);
}

TEST_CASE("loading rejects malformed JSON but accepts invalid devices") {
  // structurally fine, physically invalid: validators report, loaders load
  Pmd pmd;
  pmd.dim = 2;
  pmd.programs = {"x0"};
  pmd.outcomes = {"a0", "a1"};
  pmd.effects = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  const Pmd loaded = pmd_from_json(pmd_to_json(pmd));
  CHECK(!validate_pmd(loaded).ok());

  Json broken = pmd_to_json(pmd);
  broken.erase("effects");
  CHECK_THROWS_AS(pmd_from_json(broken), nlohmann::json::exception);
}

TEST_SUITE_END();
