#ifndef PMDKIT_SAMPLING_HPP
#define PMDKIT_SAMPLING_HPP

#include "pmdkit/devices.hpp"

#include <cstdint>
#include <random>

// Seeded generators for demo fixtures and randomized suites. Identical
// seeds reproduce identical objects bit for bit on a given platform.

namespace pmdkit {

using Rng = std::mt19937_64;

Matrix random_hermitian(int dim, Rng& rng, double scale = 1.0);
Matrix random_psd(int dim, Rng& rng, double scale = 1.0);
Matrix random_density(int dim, Rng& rng);
Matrix random_unitary(int dim, Rng& rng);

/// Random POVM by symmetrized normalization of PSD blocks.
Povm random_povm(int dim, int n_outcomes, Rng& rng);

Pmd random_pmd(int dim, int n_programs, int n_outcomes, Rng& rng);

struct SimplePmdSample {
  Pmd pmd;
  SimpleDecomposition decomposition;
};

/// Random jointly measurable PMD with its generating decomposition.
SimplePmdSample random_simple_pmd(int dim, int n_programs, int n_outcomes,
                                  int n_parent, Rng& rng);

Ensemble random_ensemble(int dim, int n_post_info, int n_answers, Rng& rng);

ClassicalChannel random_channel(std::vector<int> input_sizes, int output_size,
                                Rng& rng);

/// Random valid free operation from a PMD of shape (source_dim,
/// n_source_programs, n_source_outcomes) to the given target shape.
FreeOperation random_free_operation(int source_dim, int n_source_programs,
                                    int n_source_outcomes, int target_dim,
                                    int n_target_programs,
                                    int n_target_outcomes, int n_random,
                                    int n_instrument_outcomes, Rng& rng);

/// Two noisy mutually unbiased bases: programs "X" (Fourier basis) and
/// "Z" (computational basis), effects eta P + (1-eta) 1/dim.
Pmd noisy_mub_pmd(double eta, int dim = 2);

/// Noisy pair of qubit dichotomic observables along Bloch axes a and b:
/// effects (1 +- eta n.sigma)/2.
Pmd noisy_qubit_pair_pmd(double eta, const Eigen::Vector3d& a_axis,
                         const Eigen::Vector3d& b_axis);

/// The four-state conjugate-coding game: post-information announces the
/// basis ("X" or "Z"), the answer is the encoded bit, all weights 1/4.
GuessingGame bb84_game();

}  // namespace pmdkit

#endif  // PMDKIT_SAMPLING_HPP
