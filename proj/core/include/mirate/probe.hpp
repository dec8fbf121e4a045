#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mirate/ksg.hpp"
#include "mirate/sample_matrix.hpp"

namespace mirate {

inline constexpr std::size_t kDefaultProbeSize = 1000;

/// Fixed random subset of the training set on which per-epoch MI is measured.
struct ProbeSubset {
    std::vector<std::size_t> indices;  // ascending, distinct
    SampleMatrix x_probe;              // flattened inputs
    SampleMatrix y_probe;              // jittered labels, one column
    std::vector<int> labels;           // raw labels, aligned with indices
};

/// Data-derived soft upper bound I(X;Y).
struct ReferenceBound {
    MiEstimate ixy;
    int tiling_factor = 1;
};

struct MiCurvePoint {
    std::size_t sample_size = 0;
    double mean = 0.0;
    double std = 0.0;
    int repeats = 0;
};

/// `probe_size` distinct indices in [0, dataset_size), uniform without
/// replacement, sorted ascending. Throws ParameterError if probe_size > dataset_size.
std::vector<std::size_t> draw_probe_subset(std::size_t dataset_size, std::size_t probe_size,
                                           std::uint64_t seed);

/// Labels as a single real column plus uniform jitter.
SampleMatrix labels_to_real(std::span<const int> labels, double jitter_scale, std::uint64_t seed);

/// Feature-axis tiling: each row becomes n concatenated copies of itself.
SampleMatrix tile_features(const SampleMatrix& m, int n);

ProbeSubset make_probe_subset(const SampleMatrix& x, std::span<const int> labels,
                              std::size_t probe_size, std::uint64_t seed,
                              double jitter_scale = kDefaultJitter);

/// I(X;Y) on the given inputs/labels: jitter both sides, tile both sides, estimate.
ReferenceBound compute_reference(const SampleMatrix& x, std::span<const int> y_labels, int k,
                                 int tiling_factor, std::uint64_t seed,
                                 double jitter_scale = kDefaultJitter);

/// I(H;Y) for one layer's activations against the (already jittered) probe labels.
MiEstimate compute_ihy(const SampleMatrix& activations, const SampleMatrix& y_probe, int k,
                       std::uint64_t seed, double jitter_scale = kDefaultJitter);

/// MI-vs-sample-size curve: for each size, `repeats` independent subsets of
/// (x, y), each jittered and estimated; reports mean and sample standard deviation.
std::vector<MiCurvePoint> mi_vs_sample_size(const SampleMatrix& x, const SampleMatrix& y,
                                            std::span<const std::size_t> sizes, int repeats,
                                            int k, std::uint64_t seed,
                                            double jitter_scale = kDefaultJitter);

/// CSV with columns sample_size,mean_nats,std_nats,repeats.
void write_curve_csv(std::ostream& os, std::span<const MiCurvePoint> points);

}  // namespace mirate
