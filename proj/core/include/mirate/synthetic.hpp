#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "mirate/dataset.hpp"
#include "mirate/sample_matrix.hpp"

namespace mirate {

/// n draws of a standard bivariate Gaussian with correlation rho:
/// y = rho x + sqrt(1 - rho^2) z. Analytic MI is -0.5 ln(1 - rho^2).
std::pair<SampleMatrix, SampleMatrix> gen_gaussian_pair(std::size_t n, double rho,
                                                        std::uint64_t seed);

/// Isotropic unit-variance Gaussian blobs, class c centred at the hypercube
/// vertex given by the bits of c, scaled by `separation`. Features are then
/// min-max scaled (one common affine map) into [0, 1]. Every class is split
/// 80/20 into train/test; train and test rows are shuffled.
Dataset gen_blobs(std::size_t n_per_class, int class_count, std::size_t dim, double separation,
                  std::uint64_t seed);

}  // namespace mirate
