#ifndef PMDKIT_ROBUSTNESS_HPP
#define PMDKIT_ROBUSTNESS_HPP

#include "pmdkit/devices.hpp"
#include "pmdkit/sdp.hpp"

// Generalized incompatibility robustness of a PMD: the least noise
// weight r such that (M + N')/(1 + r) is simple, with sum_a N'(a|x)
// = r 1 for every program. Computed twice, through independent conic
// programs:
//
//  - primal: minimize the noise weight over noise blocks and a parent
//    POVM for the noisy device;
//  - dual: maximize sum_{a,x} Tr[M(a|x) w_{a,x}] - 1 over PSD blocks
//    w_{a,x} and normalized gamma_x subject to
//    sum_x gamma_x >= sum_x w_{h(x),x} for every response function h.
//
// Both attain the same value (each program is strictly feasible), and
// the dual optimizer, rescaled into an ensemble, is the game on which
// the device beats every simple device by exactly the factor 1 + r.

namespace pmdkit::robustness {

inline constexpr double kRobustnessTol = 1e-7;

struct RobustnessOptions {
  sdp::SolveOptions solver{};
};

struct RobustnessResult {
  double value = 0.0;           // r(M), >= 0 up to solver tolerance
  std::vector<Matrix> noise;    // N'(a|x), indexed x * |A| + a
  std::vector<Matrix> parent;   // parent blocks of M + N', per response fn
  double dual_value = 0.0;      // solver's internal dual bound for the primal
  double gap = 0.0;
};

RobustnessResult primal(const Pmd& pmd, const RobustnessOptions& opts = {});

struct RobustnessWitness {
  int dim = 0;
  std::vector<std::string> programs;
  std::vector<std::string> outcomes;
  std::vector<Matrix> gamma;  // per program x
  std::vector<Matrix> omega;  // per (a,x), indexed x * |A| + a
  double normalization = 0.0;  // s = sum_{a,x} Tr w_{a,x}
};

/// Dual-cone membership defect: most negative eigenvalue of
/// sum_x gamma_x - sum_x omega_{h(x),x} over all response functions h
/// (>= -tol for a valid witness).
double witness_cone_defect(const RobustnessWitness& witness);

struct DualResult {
  double value = 0.0;  // equals primal().value within kRobustnessTol
  RobustnessWitness witness;
};

DualResult dual(const Pmd& pmd, const RobustnessOptions& opts = {});

/// Ensemble rho_{x,a} = omega_{a,x}/s as a guessing game: the programs
/// become the post-information, the outcomes become the answers.
/// Throws on degenerate witnesses (s below tolerance).
GuessingGame witness_to_game(const RobustnessWitness& witness);

struct AdvantageReport {
  double robustness = 0.0;       // r from the dual program
  double direct_payoff = 0.0;    // sum_{a,x} Tr[M(a|x) rho_{x,a}]
  double simple_value = 0.0;     // optimal simple-device value of the game
  double ratio = 0.0;            // direct_payoff / simple_value
  double difference = 0.0;       // |ratio - (1 + robustness)|
  double classical_ratio = 0.0;  // classical-strategy payoff / simple_value
  bool pass = false;             // difference <= threshold
};

inline constexpr double kAdvantageIdentityTol = 1e-5;

/// Checks the advantage identity ratio = 1 + r with the two sides
/// computed through independent evaluators: the dual witness game's
/// direct payoff against the function-POVM benchmark.
AdvantageReport verify_advantage_identity(const Pmd& pmd,
                                          const RobustnessOptions& opts = {});

}  // namespace pmdkit::robustness

#endif  // PMDKIT_ROBUSTNESS_HPP
