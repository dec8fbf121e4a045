#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "mirate/sample_matrix.hpp"

namespace mirate {

/// Order of the jitter added to break duplicate points before estimation.
inline constexpr double kDefaultJitter = 1e-10;

/// Conventional small-k choice for the neighbor parameter.
inline constexpr int kDefaultNeighbors = 4;

/// A mutual-information estimate in nats. May be slightly negative; never clamped.
struct MiEstimate {
    double value = 0.0;
    std::size_t n = 0;
    int k = 0;
    std::optional<std::uint64_t> jitter_seed;
};

/// Copy of `m` with independent uniform [0, scale) noise on every entry,
/// deterministic in `seed`. scale == 0 returns an identical copy.
SampleMatrix add_jitter(const SampleMatrix& m, double scale, std::uint64_t seed);

/// Kraskov-Stoegbauer-Grassberger estimator (first variant) of I(x; y).
///
/// For each sample i, eps_i is the Chebyshev distance in the joint space to its
/// k-th nearest neighbour; n_x(i) and n_y(i) count the other samples strictly
/// closer than eps_i in each marginal. The estimate is
///   psi(k) + psi(N) - < psi(n_x + 1) + psi(n_y + 1) >.
///
/// Neighbour search is exact brute force. The result is symmetric in (x, y) and
/// bit-identical under any joint row permutation: per-sample terms are reduced
/// through integer count histograms, so summation order never depends on the
/// row order.
///
/// Throws ContractError when row counts differ or entries are non-finite, and
/// ParameterError when k < 1 or N <= k.
MiEstimate ksg_mi(const SampleMatrix& x, const SampleMatrix& y, int k = kDefaultNeighbors);

}  // namespace mirate
