#ifndef PMDKIT_JOINTMEAS_HPP
#define PMDKIT_JOINTMEAS_HPP

#include "pmdkit/devices.hpp"
#include "pmdkit/sdp.hpp"

#include <optional>

// Joint measurability of a PMD: a device is simple iff all its POVMs
// coarse-grain one parent POVM. The parent is parametrized over the
// deterministic response functions h: programs -> outcomes (shared
// randomness always folds into the parent), and feasibility is decided
// by maximizing the eigenvalue-floor slack of the parent blocks.

namespace pmdkit::jointmeas {

/// Refuse parent parametrizations beyond this many response functions.
inline constexpr long long kMaxResponseFunctions = 4096;

/// Verdict threshold on the optimal slack.
inline constexpr double kSimpleSlackTol = 1e-7;

long long response_count(int n_outcomes, int n_programs);

/// Outcome assigned by response function h at program x.
int response_value(long long h, int x, int n_outcomes);

struct CompatibilityOptions {
  double slack_tol = kSimpleSlackTol;
  sdp::SolveOptions solver{};
};

struct CompatibilityResult {
  bool is_simple = false;
  /// Optimal eigenvalue-floor slack; >= -slack_tol means simple.
  double slack = 0.0;
  /// Present iff simple; reproduces the device within kDecompositionTol.
  std::optional<SimpleDecomposition> decomposition;
  /// Present iff not simple: operators W_{a,x} (indexed x * |A| + a) of a
  /// separating functional sum_{a,x} Tr[W_{a,x} N(a|x)] that is <= 0 on
  /// every deterministic parent assignment but positive on the device.
  std::optional<std::vector<Matrix>> witness;
  /// Witness value on the device (strictly positive when not simple).
  double witness_margin = 0.0;
};

/// Decide simplicity via the parent-POVM feasibility program.
CompatibilityResult check_simple(const Pmd& pmd,
                                 const CompatibilityOptions& opts = {});

/// effects(a|x) = sum_i p(a|i,x) parent(i); throws on invalid input.
Pmd reconstruct(const SimpleDecomposition& dec);

}  // namespace pmdkit::jointmeas

#endif  // PMDKIT_JOINTMEAS_HPP
