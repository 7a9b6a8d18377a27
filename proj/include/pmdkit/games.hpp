#ifndef PMDKIT_GAMES_HPP
#define PMDKIT_GAMES_HPP

#include "pmdkit/devices.hpp"
#include "pmdkit/sdp.hpp"

#include <cstdint>
#include <optional>

// Guessing games with post-information: the quantum state arrives first,
// the index w afterwards. Evaluators:
//
//  - pguess_classical: exact optimum for a fixed PMD under purely
//    classical processing (pick the program from w, relabel outcomes).
//  - pguess_simple: exact optimum over all simple devices and all free
//    processing; the device may as well be measured before w arrives,
//    which coarse-grains to one POVM indexed by answer functions
//    f: post-info -> answer.
//  - pguess_seesaw: lower bound on the full optimum including quantum
//    pre-processing, by alternating exact classical optimization with an
//    SDP over instrument Choi blocks.

namespace pmdkit::games {

/// Guard on the |answers|^|post-info| function-POVM parametrization.
inline constexpr long long kMaxAnswerFunctions = 4096;

struct ClassicalStrategy {
  std::vector<int> program_for_post_info;           // f: w -> x
  std::vector<std::vector<int>> answer_for_outcome;  // g[w][a] -> z
};

struct StrategyValue {
  double value = 0.0;
  std::optional<ClassicalStrategy> classical;
  /// Function-POVM blocks (pguess_simple), indexed by f: W -> Z.
  std::vector<Matrix> function_povm;
  /// The strategy as a device on the game space: response(z|w).
  std::optional<Pmd> response;
  /// Set for the see-saw, whose value is a bound, not a certificate.
  bool lower_bound_only = false;
  bool converged = true;
};

/// Exact classical-strategy optimum for a fixed device:
/// sum_w max_x sum_a max_z Tr[rho_{w,z} M(a|x)].
StrategyValue pguess_classical(const Pmd& pmd, const GuessingGame& game);

/// Exact simple-device benchmark: the function-POVM program
/// max sum_f Tr[T_f sigma_f], sigma_f = sum_w rho_{w,f(w)},
/// over POVMs {T_f} indexed by answer functions.
StrategyValue pguess_simple(const GuessingGame& game,
                            const sdp::SolveOptions& solver = {});

struct SeesawOptions {
  /// 0 means the default |programs| * |answers|.
  int instrument_outcomes = 0;
  int restarts = 4;
  std::uint64_t seed = 1;
  int max_iters = 60;
  double improve_tol = 1e-10;
  sdp::SolveOptions solver{};
};

/// Monotone alternating lower bound on the full optimum of the game for
/// the given device, including quantum pre-processing from the game
/// space into the device space. Deterministic for a fixed seed.
StrategyValue pguess_seesaw(const Pmd& pmd, const GuessingGame& game,
                            const SeesawOptions& opts = {});

struct WitnessOutcome {
  bool incompatible = false;
  /// Advantage of the device over the simple benchmark on the witness
  /// game (only when incompatible).
  double margin = 0.0;
  /// Largest direct-payoff excess over the benchmark across the sampled
  /// battery (only when simple).
  double max_excess = 0.0;
  std::optional<GuessingGame> game;
};

struct WitnessCheckOptions {
  int sample_games = 50;
  std::uint64_t seed = 7;
};

/// For an incompatible device, extract its witness game and verify the
/// strict advantage; for a simple device, verify the absence of any
/// advantage on a sampled battery of games.
WitnessOutcome incompatibility_witness_check(
    const Pmd& pmd, const WitnessCheckOptions& opts = {});

}  // namespace pmdkit::games

#endif  // PMDKIT_GAMES_HPP
