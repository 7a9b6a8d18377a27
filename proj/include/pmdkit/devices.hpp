#ifndef PMDKIT_DEVICES_HPP
#define PMDKIT_DEVICES_HPP

#include "pmdkit/operators.hpp"

#include <functional>
#include <string>
#include <vector>

// Data model and validation for programmable measurement devices (PMDs),
// state ensembles, instruments, classical channels, and the free
// operations that act on PMDs: shared randomness, a program-independent
// pre-processing instrument, and classical pre/post channels.
//
// Alphabets are explicit ordered label lists and all tables are dense.
// Objects are immutable after validation; every operation is pure.

namespace pmdkit {

// Absolute tolerances used by the validators.
inline constexpr double kPovmCompletenessTol = 1e-8;
inline constexpr double kEnsembleNormTol = 1e-8;
inline constexpr double kChannelNormTol = 1e-10;
inline constexpr double kDecompositionTol = 1e-7;
inline constexpr double kPmdEqualityTol = 1e-7;

struct ValidationIssue {
  std::string what;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// A positive-operator valued measure: PSD effects summing to identity.
struct Povm {
  std::vector<Matrix> effects;
  int dim() const {
    return effects.empty() ? 0 : static_cast<int>(effects.front().rows());
  }
  int outcomes() const { return static_cast<int>(effects.size()); }
};

ValidationReport validate_povm(const Povm& povm);

/// A programmable measurement device: one POVM per program label, all on
/// the same underlying space.
struct Pmd {
  int dim = 0;
  std::vector<std::string> programs;  // x labels
  std::vector<std::string> outcomes;  // a labels
  std::vector<Matrix> effects;        // index x * n_outcomes + a

  int n_programs() const { return static_cast<int>(programs.size()); }
  int n_outcomes() const { return static_cast<int>(outcomes.size()); }
  const Matrix& effect(int a, int x) const {
    return effects[static_cast<std::size_t>(x) * outcomes.size() +
                   static_cast<std::size_t>(a)];
  }
  Matrix& effect(int a, int x) {
    return effects[static_cast<std::size_t>(x) * outcomes.size() +
                   static_cast<std::size_t>(a)];
  }
  Povm povm(int x) const;
};

/// Lists every violated invariant with its magnitude; empty iff valid.
ValidationReport validate_pmd(const Pmd& pmd);

/// Throws InvalidInputError with the report summary unless valid.
void require_valid(const Pmd& pmd);

/// Max absolute effect-wise deviation; requires matching alphabets.
double max_effect_distance(const Pmd& a, const Pmd& b);

bool pmds_equal(const Pmd& a, const Pmd& b, double tol = kPmdEqualityTol);

/// A PMD written as one parent POVM plus classical post-processing:
/// effects(a|x) = sum_i p(a|i,x) parent(i).
struct SimpleDecomposition {
  Povm parent;
  std::vector<std::string> programs;
  std::vector<std::string> outcomes;
  std::vector<double> post;  // p(a|i,x), index (i * n_programs + x) * n_outcomes + a

  int n_programs() const { return static_cast<int>(programs.size()); }
  int n_outcomes() const { return static_cast<int>(outcomes.size()); }
  double post_prob(int a, int i, int x) const {
    return post[(static_cast<std::size_t>(i) * programs.size() +
                 static_cast<std::size_t>(x)) *
                    outcomes.size() +
                static_cast<std::size_t>(a)];
  }
};

ValidationReport validate_decomposition(const SimpleDecomposition& dec);

/// A double-indexed sub-normalized ensemble rho_{w,z}; Tr rho_{w,z} is a
/// normalized joint distribution over (post_info, answer).
struct Ensemble {
  int dim = 0;
  std::vector<std::string> post_info;  // w labels
  std::vector<std::string> answers;    // z labels
  std::vector<Matrix> states;          // index w * n_answers + z

  int n_post_info() const { return static_cast<int>(post_info.size()); }
  int n_answers() const { return static_cast<int>(answers.size()); }
  const Matrix& state(int w, int z) const {
    return states[static_cast<std::size_t>(w) * answers.size() +
                  static_cast<std::size_t>(z)];
  }
  Matrix& state(int w, int z) {
    return states[static_cast<std::size_t>(w) * answers.size() +
                  static_cast<std::size_t>(z)];
  }
};

ValidationReport validate_ensemble(const Ensemble& ensemble);
void require_valid(const Ensemble& ensemble);

/// A guessing game with post-information: the referee draws (w,z) with
/// probability Tr rho_{w,z}, sends the normalized state, then announces
/// w; the player guesses z.
struct GuessingGame {
  Ensemble ensemble;
};

/// Conditional probability table over declared finite alphabets. The
/// axis order of `input_sizes` is fixed by each use site (documented at
/// the FreeOperation fields below).
struct ClassicalChannel {
  std::vector<int> input_sizes;
  int output_size = 0;
  std::vector<double> table;  // index joint_input * output_size + output

  int joint_inputs() const;
  int joint_index(const std::vector<int>& inputs) const;
  double prob(const std::vector<int>& inputs, int output) const;

  /// Point-mass channel defined by a function of the joint inputs.
  static ClassicalChannel deterministic(
      std::vector<int> input_sizes, int output_size,
      const std::function<int(const std::vector<int>&)>& choice);

  static ClassicalChannel uniform(std::vector<int> input_sizes,
                                  int output_size);
};

ValidationReport validate_channel(const ClassicalChannel& channel);

/// A free operation on PMDs:
///   N(b|y) = sum_r mu(r) sum_{i,x,a}
///            q(b|a,x,i,y,r) p(x|i,y,r) E_{i|r}^dag[M(a|x)],
/// where {E_{i|r}} pre-processes the incoming system (target space ->
/// source space) before the program arrives, and p, q are classical
/// channels acting once it has.
///
/// Channel axis orders: pre p(x|i,y,r) has inputs (i, y, r); post
/// q(b|a,x,i,y,r) has inputs (a, x, i, y, r).
struct FreeOperation {
  std::vector<double> randomness;                 // mu(r)
  std::vector<std::vector<ChoiMap>> instruments;  // [r][i]
  ClassicalChannel pre;
  ClassicalChannel post;
  std::vector<std::string> target_programs;  // y labels
  std::vector<std::string> target_outcomes;  // b labels

  int n_random() const { return static_cast<int>(randomness.size()); }
  int n_instrument_outcomes() const {
    return instruments.empty() ? 0
                               : static_cast<int>(instruments.front().size());
  }
  /// Dimension of the PMD this operation produces (instrument input).
  int target_dim() const;
  /// Dimension of the PMD this operation consumes (instrument output).
  int source_dim() const;
};

/// Structural validation of the operation against source alphabet sizes
/// and dimension.
ValidationReport validate_free_operation(const FreeOperation& op,
                                         int source_programs,
                                         int source_outcomes, int source_dim);

/// The identity operation on a PMD's shape (single r, identity
/// instrument, copy channels).
FreeOperation identity_operation(const Pmd& pmd);

/// Exact application of a free operation. Throws on alphabet or
/// dimension mismatch and on invalid operations.
Pmd apply_free_operation(const FreeOperation& op, const Pmd& pmd);

/// Sequential composition: apply `first`, then `second`. The returned
/// single operation reproduces the pair exactly (the intermediate
/// program draw is folded in by Bayes inversion).
FreeOperation compose_free_operations(const FreeOperation& second,
                                      const FreeOperation& first);

/// Effect-wise convex combination of PMDs with identical alphabets.
Pmd mix_pmds(const std::vector<double>& weights, const std::vector<Pmd>& pmds);

}  // namespace pmdkit

#endif  // PMDKIT_DEVICES_HPP
