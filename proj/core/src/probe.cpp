#include "mirate/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "mirate/errors.hpp"
#include "mirate/rng.hpp"

namespace mirate {

std::vector<std::size_t> draw_probe_subset(std::size_t dataset_size, std::size_t probe_size,
                                           std::uint64_t seed) {
    if (probe_size > dataset_size) {
        throw ParameterError("draw_probe_subset: probe size exceeds dataset size");
    }
    std::vector<std::size_t> pool(dataset_size);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    CounterRng rng(seed);
    // Partial Fisher-Yates: the first probe_size slots end up a uniform sample.
    for (std::size_t i = 0; i < probe_size; ++i) {
        const std::size_t j = i + rng.below(dataset_size - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(probe_size);
    std::sort(pool.begin(), pool.end());
    return pool;
}

SampleMatrix labels_to_real(std::span<const int> labels, double jitter_scale, std::uint64_t seed) {
    SampleMatrix col(labels.size(), 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) throw ContractError("labels_to_real: labels must be nonnegative");
        col(i, 0) = static_cast<double>(labels[i]);
    }
    return add_jitter(col, jitter_scale, seed);
}

SampleMatrix tile_features(const SampleMatrix& m, int n) {
    if (n < 1) throw ParameterError("tile_features: tiling factor must be >= 1");
    const std::size_t d = m.cols();
    SampleMatrix out(m.rows(), d * static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto src = m.row(r);
        auto dst = out.row(r);
        for (int t = 0; t < n; ++t) {
            std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(t * d));
        }
    }
    return out;
}

ProbeSubset make_probe_subset(const SampleMatrix& x, std::span<const int> labels,
                              std::size_t probe_size, std::uint64_t seed, double jitter_scale) {
    if (x.rows() != labels.size()) {
        throw ContractError("make_probe_subset: inputs and labels differ in length");
    }
    ProbeSubset p;
    p.indices = draw_probe_subset(x.rows(), probe_size, derive_seed(seed, "probe-indices"));
    p.x_probe = x.select_rows(p.indices);
    p.labels.reserve(p.indices.size());
    for (std::size_t i : p.indices) p.labels.push_back(labels[i]);
    p.y_probe = labels_to_real(p.labels, jitter_scale, derive_seed(seed, "probe-labels"));
    return p;
}

ReferenceBound compute_reference(const SampleMatrix& x, std::span<const int> y_labels, int k,
                                 int tiling_factor, std::uint64_t seed, double jitter_scale) {
    if (x.rows() != y_labels.size()) {
        throw ContractError("compute_reference: inputs and labels differ in length");
    }
    const SampleMatrix xj = add_jitter(x, jitter_scale, derive_seed(seed, "ixy-x"));
    const SampleMatrix yj = labels_to_real(y_labels, jitter_scale, derive_seed(seed, "ixy-y"));
    ReferenceBound ref;
    ref.tiling_factor = tiling_factor;
    if (tiling_factor == 1) {
        ref.ixy = ksg_mi(xj, yj, k);
    } else {
        ref.ixy = ksg_mi(tile_features(xj, tiling_factor), tile_features(yj, tiling_factor), k);
    }
    ref.ixy.jitter_seed = seed;
    return ref;
}

MiEstimate compute_ihy(const SampleMatrix& activations, const SampleMatrix& y_probe, int k,
                       std::uint64_t seed, double jitter_scale) {
    if (activations.rows() != y_probe.rows()) {
        throw ContractError("compute_ihy: activations and probe labels differ in length");
    }
    MiEstimate est = ksg_mi(add_jitter(activations, jitter_scale, seed), y_probe, k);
    est.jitter_seed = seed;
    return est;
}

std::vector<MiCurvePoint> mi_vs_sample_size(const SampleMatrix& x, const SampleMatrix& y,
                                            std::span<const std::size_t> sizes, int repeats,
                                            int k, std::uint64_t seed, double jitter_scale) {
    if (x.rows() != y.rows()) throw ContractError("mi_vs_sample_size: row counts differ");
    if (repeats < 2) throw ParameterError("mi_vs_sample_size: repeats must be >= 2");
    for (std::size_t s : sizes) {
        if (s > x.rows()) throw ParameterError("mi_vs_sample_size: size exceeds sample count");
    }

    std::vector<MiCurvePoint> curve;
    curve.reserve(sizes.size());
    for (std::size_t s : sizes) {
        std::vector<double> values(static_cast<std::size_t>(repeats));
        for (int r = 0; r < repeats; ++r) {
            const std::uint64_t rs = derive_seed(derive_seed(seed, "curve", s), "repeat",
                                                 static_cast<std::uint64_t>(r));
            const auto idx = draw_probe_subset(x.rows(), s, derive_seed(rs, "subset"));
            const SampleMatrix xs = add_jitter(x.select_rows(idx), jitter_scale,
                                               derive_seed(rs, "jitter-x"));
            const SampleMatrix ys = add_jitter(y.select_rows(idx), jitter_scale,
                                               derive_seed(rs, "jitter-y"));
            values[static_cast<std::size_t>(r)] = ksg_mi(xs, ys, k).value;
        }
        const double mean =
            std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(repeats);
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        curve.push_back({s, mean, std::sqrt(ss / static_cast<double>(repeats - 1)), repeats});
    }
    return curve;
}

void write_curve_csv(std::ostream& os, std::span<const MiCurvePoint> points) {
    os << "sample_size,mean_nats,std_nats,repeats\n";
    char buf[64];
    for (const auto& p : points) {
        os << p.sample_size << ',';
        std::snprintf(buf, sizeof buf, "%.9g", p.mean);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.9g", p.std);
        os << buf << ',' << p.repeats << '\n';
    }
}

}  // namespace mirate
