#include "mirate/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mirate/errors.hpp"
#include "mirate/rng.hpp"

namespace mirate {

std::pair<SampleMatrix, SampleMatrix> gen_gaussian_pair(std::size_t n, double rho,
                                                        std::uint64_t seed) {
    if (!(rho > -1.0 && rho < 1.0)) throw ParameterError("gen_gaussian_pair: |rho| must be < 1");
    SampleMatrix x(n, 1);
    SampleMatrix y(n, 1);
    CounterRng rng(derive_seed(seed, "gaussian-pair"));
    const double s = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal();
        const double z = rng.normal();
        x(i, 0) = a;
        y(i, 0) = rho * a + s * z;
    }
    return {std::move(x), std::move(y)};
}

Dataset gen_blobs(std::size_t n_per_class, int class_count, std::size_t dim, double separation,
                  std::uint64_t seed) {
    if (class_count < 2) throw ParameterError("gen_blobs: need at least two classes");
    if (dim == 0 || n_per_class < 2) throw ParameterError("gen_blobs: empty blobs");
    if (dim < 63 && static_cast<std::uint64_t>(class_count) > (std::uint64_t{1} << dim)) {
        throw ParameterError("gen_blobs: more classes than hypercube vertices");
    }
    if (!(separation >= 0.0)) throw ParameterError("gen_blobs: separation must be >= 0");

    const std::size_t n_train = n_per_class - n_per_class / 5;
    const auto classes = static_cast<std::size_t>(class_count);

    CounterRng rng(derive_seed(seed, "blobs"));
    SampleMatrix all(n_per_class * classes, dim);
    std::vector<int> labels(all.rows());
    std::vector<bool> is_train(all.rows());
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const std::size_t r = c * n_per_class + i;
            auto row = all.row(r);
            for (std::size_t j = 0; j < dim; ++j) {
                const double centre = (j < 64 && ((c >> j) & 1U)) ? separation : 0.0;
                row[j] = centre + rng.normal();
            }
            labels[r] = static_cast<int>(c);
            is_train[r] = i < n_train;
        }
    }

    const auto [lo, hi] = std::minmax_element(all.values().begin(), all.values().end());
    const double min = *lo;
    const double range = *hi - *lo;
    for (double& v : all.values()) v = range > 0.0 ? std::clamp((v - min) / range, 0.0, 1.0) : 0.5;

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t r = 0; r < all.rows(); ++r) (is_train[r] ? train_idx : test_idx).push_back(r);
    auto shuffle = [&rng](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    };
    shuffle(train_idx);
    shuffle(test_idx);

    Dataset ds;
    ds.class_count = class_count;
    ds.train_x = all.select_rows(train_idx);
    ds.test_x = all.select_rows(test_idx);
    for (std::size_t r : train_idx) ds.train_labels.push_back(labels[r]);
    for (std::size_t r : test_idx) ds.test_labels.push_back(labels[r]);
    return ds;
}

}  // namespace mirate
