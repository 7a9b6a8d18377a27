// Acceptance suite: one criterion per section, one PASS/FAIL line each,
// nonzero exit iff any criterion fails. Tolerances are fixed here, not
// configurable.

#include "pmdkit/convert.hpp"
#include "pmdkit/games.hpp"
#include "pmdkit/jointmeas.hpp"
#include "pmdkit/robustness.hpp"
#include "pmdkit/sampling.hpp"
#include "pmdkit/sdp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace pmdkit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run_criterion(int id, const std::string& name, double budget_seconds,
                   const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (budget_seconds > 0 && seconds > budget_seconds) {
    outcome.pass = false;
    outcome.detail += (outcome.detail.empty() ? "" : "; ");
    outcome.detail += "runtime budget exceeded";
  }
  if (!outcome.pass) ++failures;
  std::printf("[%s] criterion %d: %s — %s (%.1f s)\n",
              outcome.pass ? "PASS" : "FAIL", id, name.c_str(),
              outcome.detail.empty() ? "ok" : outcome.detail.c_str(), seconds);
  std::fflush(stdout);
}

Eigen::Vector3d random_unit(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-3) v = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  return v.normalized();
}

// ---- criterion 1 -----------------------------------------------------
Outcome joint_measurability_threshold() {
  Outcome out;
  Rng rng(101);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double threshold = 1.0 / std::sqrt(2.0);
  int checked = 0;
  int agree = 0;
  while (checked < 200) {
    const Eigen::Vector3d a = random_unit(rng);
    Eigen::Vector3d b = random_unit(rng);
    b -= b.dot(a) * a;
    if (b.norm() < 1e-6) continue;
    b.normalize();
    const double eta = unif(rng);
    if (std::abs(eta - threshold) < 1e-3) continue;  // off the boundary
    const bool analytic =
        eta * ((a + b).norm() + (a - b).norm()) <= 2.0;
    const bool sdp_verdict =
        jointmeas::check_simple(noisy_qubit_pair_pmd(eta, a, b)).is_simple;
    if (analytic == sdp_verdict) ++agree;
    ++checked;
  }
  double lo = 0.5, hi = 0.9;
  for (int iter = 0; iter < 25; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (jointmeas::check_simple(noisy_mub_pmd(mid, 2)).is_simple ? lo : hi) = mid;
  }
  const double flip = 0.5 * (lo + hi);
  std::ostringstream os;
  os << agree << "/200 agree, flip at " << flip << " (|err| "
     << std::abs(flip - threshold) << ")";
  out.detail = os.str();
  out.pass = (agree == 200) && std::abs(flip - threshold) <= 1e-3;
  return out;
}

// ---- criterion 2 -----------------------------------------------------
std::vector<Pmd> duality_suite() {
  std::vector<Pmd> suite;
  Rng rng(202);
  for (int k = 0; k < 50; ++k) suite.push_back(random_pmd(2, 2, 2, rng));
  for (int k = 0; k < 10; ++k) suite.push_back(random_pmd(3, 2, 3, rng));
  return suite;
}

Outcome strong_duality() {
  Outcome out;
  double worst = 0.0;
  for (const Pmd& pmd : duality_suite()) {
    const auto p = robustness::primal(pmd);
    const auto d = robustness::dual(pmd);
    worst = std::max(worst, std::abs(p.value - d.value));
  }
  std::ostringstream os;
  os << "60 devices, worst primal-dual deviation " << worst;
  out.detail = os.str();
  out.pass = worst <= 1e-7;
  return out;
}

// ---- criterion 3 -----------------------------------------------------
Outcome advantage_identity() {
  Outcome out;
  double worst = 0.0;
  for (const Pmd& pmd : duality_suite()) {
    const auto report = robustness::verify_advantage_identity(pmd);
    worst = std::max(worst, report.difference);
  }
  const auto sharp = robustness::verify_advantage_identity(noisy_mub_pmd(1.0));
  worst = std::max(worst, sharp.difference);
  const double bb84 = (2.0 + std::sqrt(2.0)) / 4.0;
  const double fixture_err = std::abs(sharp.simple_value - bb84);
  std::ostringstream os;
  os << "worst |ratio-(1+r)| " << worst << ", sharp-pair benchmark err "
     << fixture_err;
  out.detail = os.str();
  out.pass = worst <= 1e-5 && fixture_err <= 1e-6;
  return out;
}

// ---- criterion 4 -----------------------------------------------------
Outcome monotonicity() {
  Outcome out;
  Rng rng(404);
  double worst_pguess = 0.0;
  double worst_robustness = 0.0;
  games::SeesawOptions sopts;
  sopts.restarts = 3;
  sopts.max_iters = 30;
  for (int k = 0; k < 100; ++k) {
    sopts.seed = 1000 + k;
    const Pmd pmd = random_pmd(2, 2, 2, rng);
    const FreeOperation op =
        random_free_operation(2, 2, 2, 2, 2, 2, 2, 2, rng);
    const GuessingGame game{random_ensemble(2, 2, 2, rng)};
    const Pmd processed = apply_free_operation(op, pmd);

    const double before = games::pguess_seesaw(pmd, game, sopts).value;
    const double after = games::pguess_classical(processed, game).value;
    worst_pguess = std::max(worst_pguess, after - before);

    const double r_before = robustness::primal(pmd).value;
    const double r_after = robustness::primal(processed).value;
    worst_robustness = std::max(worst_robustness, r_after - r_before);
  }
  std::ostringstream os;
  os << "worst pguess increase " << worst_pguess
     << ", worst robustness increase " << worst_robustness;
  out.detail = os.str();
  out.pass = worst_pguess <= 1e-6 && worst_robustness <= 1e-6;
  return out;
}

// ---- criterion 5 -----------------------------------------------------
Outcome corollary_witness() {
  Outcome out;
  Rng rng(505);
  std::vector<Pmd> incompatible{noisy_mub_pmd(0.75), noisy_mub_pmd(0.85),
                                noisy_mub_pmd(1.0), noisy_mub_pmd(0.9, 3)};
  while (incompatible.size() < 8) {
    Pmd pmd = random_pmd(2, 2, 2, rng);
    const auto compat = jointmeas::check_simple(pmd);
    if (!compat.is_simple && compat.slack < -1e-4) {
      incompatible.push_back(std::move(pmd));
    }
  }
  double min_margin = 1.0;
  for (const Pmd& pmd : incompatible) {
    const auto outcome = games::incompatibility_witness_check(pmd);
    if (!outcome.incompatible) {
      out.pass = false;
      out.detail = "device flagged compatible unexpectedly";
      return out;
    }
    min_margin = std::min(min_margin, outcome.margin);
  }

  std::vector<Pmd> simple{noisy_mub_pmd(0.3), noisy_mub_pmd(0.6)};
  for (int k = 0; k < 2; ++k) {
    simple.push_back(random_simple_pmd(2, 2, 2, 3, rng).pmd);
  }
  double max_excess = -1.0;
  for (std::size_t k = 0; k < simple.size(); ++k) {
    games::WitnessCheckOptions wopts;
    wopts.sample_games = 50;
    wopts.seed = 900 + k;
    const auto outcome =
        games::incompatibility_witness_check(simple[k], wopts);
    if (outcome.incompatible) {
      out.pass = false;
      out.detail = "device flagged incompatible unexpectedly";
      return out;
    }
    max_excess = std::max(max_excess, outcome.max_excess);
  }
  std::ostringstream os;
  os << incompatible.size() << " incompatible devices, min margin "
     << min_margin << "; " << simple.size()
     << " simple devices x 50 games, max excess " << max_excess;
  out.detail = os.str();
  out.pass = min_margin >= 1e-7 && max_excess <= 1e-7;
  return out;
}

// ---- criterion 6 -----------------------------------------------------
Outcome simple_interconversion_closure() {
  Outcome out;
  Rng rng(606);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int dim1 = 2 + static_cast<int>(rng() % 2);
    const int dim2 = 2 + static_cast<int>(rng() % 2);
    const auto p1 = random_simple_pmd(dim1, 2, 2, 3, rng);
    const auto p2 = random_simple_pmd(dim2, 2, 2, 3, rng);
    const FreeOperation fwd =
        convert::simple_interconvert(p1.decomposition, p2.decomposition);
    worst = std::max(
        worst, max_effect_distance(apply_free_operation(fwd, p1.pmd), p2.pmd));
    const FreeOperation back =
        convert::simple_interconvert(p2.decomposition, p1.decomposition);
    worst = std::max(
        worst, max_effect_distance(apply_free_operation(back, p2.pmd), p1.pmd));
  }
  std::ostringstream os;
  os << "100 pairs both directions, worst reproduction error " << worst;
  out.detail = os.str();
  out.pass = worst <= 1e-6;
  return out;
}

// ---- criterion 7 -----------------------------------------------------
Outcome convertibility_lp_soundness() {
  Outcome out;
  Rng rng(707);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  double worst_error = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Pmd src = random_pmd(2, 2, 2, rng);
    Pmd dst;
    dst.dim = 2;
    dst.programs = {"y0", "y1"};
    dst.outcomes = {"b0", "b1"};
    dst.effects.assign(4, Matrix::Zero(2, 2));
    const double w = unif(rng);
    for (int part = 0; part < 2; ++part) {
      const double weight = (part == 0) ? w : 1.0 - w;
      const int f[2] = {coin(rng), coin(rng)};
      const int g[4] = {coin(rng), coin(rng), coin(rng), coin(rng)};
      for (int y = 0; y < 2; ++y) {
        for (int a = 0; a < 2; ++a) {
          dst.effect(g[y * 2 + a], y) += weight * src.effect(a, f[y]);
        }
      }
    }
    const auto cert = convert::convertibility_lp(src, dst);
    if (cert.verdict != convert::Verdict::Convertible) {
      out.pass = false;
      out.detail = "a strategy mixture was not recognized as convertible";
      return out;
    }
    worst_error = std::max(worst_error, cert.protocol_error);
  }

  double min_margin = 1.0;
  for (int k = 0; k < 20; ++k) {
    const Pmd src = random_simple_pmd(2, 2, 2, 3, rng).pmd;
    const double eta = 0.75 + 0.25 * unif(rng);
    const Pmd dst = noisy_mub_pmd(eta, 2);
    const auto cert = convert::convertibility_lp(src, dst);
    if (cert.verdict != convert::Verdict::NotConvertibleClassical ||
        !cert.witness_game.has_value()) {
      out.pass = false;
      out.detail = "an impossible conversion was not refuted";
      return out;
    }
    min_margin = std::min(min_margin, cert.margin);
  }
  std::ostringstream os;
  os << "50 recovered protocols, worst error " << worst_error
     << "; 20 refutations, min margin " << min_margin;
  out.detail = os.str();
  out.pass = worst_error <= 1e-6 && min_margin > 1e-7;
  return out;
}

// ---- criterion 8 -----------------------------------------------------
Outcome solver_self_check() {
  Outcome out;
  const sdp::AuditStats stats = sdp::audit_stats();

  Rng rng(808);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_residual = 0.0;
  bool all_optimal = true;
  for (int trial = 0; trial < 10; ++trial) {
    sdp::SdpProblem problem;
    problem.blocks = {{"a", 2}, {"b", 3}};
    std::vector<Matrix> planted;
    for (const auto& blk : problem.blocks) {
      Matrix h(blk.dim, blk.dim);
      for (int i = 0; i < blk.dim; ++i) {
        for (int j = 0; j < blk.dim; ++j) {
          h(i, j) = Complex(gauss(rng), gauss(rng));
        }
      }
      planted.push_back(h * h.adjoint());
    }
    problem.objective = {{0, Matrix::Identity(2, 2)},
                         {1, Matrix::Identity(3, 3)}};
    for (int k = 0; k < 5; ++k) {
      sdp::Constraint con;
      double rhs = 0.0;
      for (int blk = 0; blk < 2; ++blk) {
        Matrix coeff(problem.blocks[blk].dim, problem.blocks[blk].dim);
        for (int i = 0; i < coeff.rows(); ++i) {
          for (int j = 0; j < coeff.cols(); ++j) {
            coeff(i, j) = Complex(gauss(rng), gauss(rng));
          }
        }
        coeff = 0.5 * (coeff + Matrix(coeff.adjoint()));
        rhs += (coeff * planted[blk]).trace().real();
        con.lhs.push_back({blk, coeff});
      }
      con.rhs = rhs;
      problem.constraints.push_back(con);
    }
    const auto sol = sdp::solve(problem);
    all_optimal =
        all_optimal && (sol.status == sdp::SolveStatus::Optimal);
    worst_residual = std::max(worst_residual, sol.max_residual);
  }

  std::ostringstream os;
  os << stats.optimal_solves << " audited solves, "
     << stats.certificate_failures << " certificate failures; "
     << "10 planted problems, worst residual " << worst_residual;
  out.detail = os.str();
  out.pass = stats.optimal_solves > 0 && stats.certificate_failures == 0 &&
             all_optimal && worst_residual <= 1e-8;
  return out;
}

}  // namespace

int main() {
  sdp::reset_audit_stats();
  run_criterion(1, "joint-measurability threshold", 30.0,
                joint_measurability_threshold);
  run_criterion(2, "robustness strong duality", 300.0, strong_duality);
  run_criterion(3, "advantage-ratio identity", 300.0, advantage_identity);
  run_criterion(4, "monotonicity under free operations", 600.0, monotonicity);
  run_criterion(5, "incompatibility witness games", 600.0, corollary_witness);
  run_criterion(6, "simple-device interconversion", 600.0,
                simple_interconversion_closure);
  run_criterion(7, "convertibility LP soundness", 600.0,
                convertibility_lp_soundness);
  run_criterion(8, "solver self-check", 120.0, solver_self_check);
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
