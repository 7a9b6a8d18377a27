#ifndef PMDKIT_CONVERT_HPP
#define PMDKIT_CONVERT_HPP

#include "pmdkit/devices.hpp"
#include "pmdkit/games.hpp"

#include <cstdint>
#include <optional>

// PMD convertibility under free operations.
//
//  - convertibility_lp decides the classical-processing subclass exactly
//    on equal dimensions: mixtures of deterministic program/outcome
//    relabelings. Feasibility yields an explicit protocol; the Farkas
//    ray of an infeasible system yields, after shift-and-rescale, a
//    guessing game on which the target strictly beats every classical
//    processing of the source.
//  - simple_interconvert constructively maps any simple device to any
//    other: measure the target's parent POVM destructively during
//    pre-processing and post-process its outcome classically.
//  - refute_by_game_search is a heuristic ascent over witness games; it
//    refutes soundly only against the exactly evaluated classical class
//    and otherwise reports undecided with the best candidate attached.

namespace pmdkit::convert {

/// Guard on the deterministic-strategy enumeration |X|^|Y| * |B|^(|A||Y|).
inline constexpr long long kMaxStrategies = 1000000;

inline constexpr double kProtocolTol = 1e-6;
inline constexpr double kMarginTol = 1e-7;

enum class Verdict { Convertible, NotConvertibleClassical, Undecided };

std::string to_string(Verdict verdict);

struct ConversionCertificate {
  Verdict verdict = Verdict::Undecided;
  /// Present when convertible: reproduces dst from src within kProtocolTol.
  std::optional<FreeOperation> protocol;
  double protocol_error = 0.0;
  /// Present when refuted (and for undecided candidates from the search).
  std::optional<GuessingGame> witness_game;
  /// Target payoff minus the source bound on the witness game.
  double margin = 0.0;
};

/// Exact decision for mixtures of deterministic classical processings
/// (equal dimensions required).
ConversionCertificate convertibility_lp(const Pmd& src, const Pmd& dst);

/// Free operation carrying the device of src_dec to the device of
/// dst_dec; the construction discards the source system entirely.
FreeOperation simple_interconvert(const SimpleDecomposition& src_dec,
                                  const SimpleDecomposition& dst_dec);

struct RefuteOptions {
  int restarts = 6;
  std::uint64_t seed = 11;
  int ascent_iters = 12;
  games::SeesawOptions seesaw = [] {
    games::SeesawOptions s;
    s.restarts = 2;
    s.max_iters = 25;
    return s;
  }();
};

/// Search for a game where dst's direct payoff beats src's evaluated
/// bound. Sound (NotConvertibleClassical) only when the source side is
/// evaluated exactly, i.e. on equal dimensions via the classical
/// evaluator; otherwise Undecided with the candidate attached.
ConversionCertificate refute_by_game_search(const Pmd& src, const Pmd& dst,
                                            const RefuteOptions& opts = {});

}  // namespace pmdkit::convert

#endif  // PMDKIT_CONVERT_HPP
