#include "mirate/ksg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mirate/digamma.hpp"
#include "mirate/errors.hpp"
#include "mirate/rng.hpp"

namespace mirate {

namespace {

double chebyshev(std::span<const double> a, std::span<const double> b) noexcept {
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        d = std::max(d, std::abs(a[c] - b[c]));
    }
    return d;
}

}  // namespace

SampleMatrix add_jitter(const SampleMatrix& m, double scale, std::uint64_t seed) {
    if (!(scale >= 0.0)) throw ParameterError("add_jitter: scale must be >= 0");
    SampleMatrix out = m;
    if (scale == 0.0) return out;
    CounterRng rng(seed);
    for (double& v : out.values()) v += rng.uniform() * scale;
    return out;
}

MiEstimate ksg_mi(const SampleMatrix& x, const SampleMatrix& y, int k) {
    if (x.rows() != y.rows()) {
        throw ContractError("ksg_mi: x and y must have the same number of rows");
    }
    if (x.cols() == 0 || y.cols() == 0) {
        throw ContractError("ksg_mi: samples need at least one dimension");
    }
    if (k < 1) throw ParameterError("ksg_mi: k must be >= 1");
    const std::size_t n = x.rows();
    if (n <= static_cast<std::size_t>(k)) {
        throw ParameterError("ksg_mi: need more samples than neighbours (N > k)");
    }
    if (!x.all_finite() || !y.all_finite()) {
        throw ContractError("ksg_mi: non-finite sample entries");
    }

    std::vector<std::size_t> hist_x(n, 0);
    std::vector<std::size_t> hist_y(n, 0);
    std::vector<double> dx(n);
    std::vector<double> dy(n);
    std::vector<double> joint;
    joint.reserve(n - 1);

    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.row(i);
        const auto yi = y.row(i);
        joint.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dx[j] = chebyshev(xi, x.row(j));
            dy[j] = chebyshev(yi, y.row(j));
            joint.push_back(std::max(dx[j], dy[j]));
        }
        // Only the k-th distance value is needed, and it does not depend on how
        // equal-distance neighbours are ordered.
        auto kth = joint.begin() + (k - 1);
        std::nth_element(joint.begin(), kth, joint.end());
        const double eps = *kth;

        std::size_t nx = 0;
        std::size_t ny = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            nx += dx[j] < eps;
            ny += dy[j] < eps;
        }
        ++hist_x[nx];
        ++hist_y[ny];
    }

    double sum_x = 0.0;
    double sum_y = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (hist_x[c] == 0 && hist_y[c] == 0) continue;
        const double psi = digamma(static_cast<double>(c + 1));
        sum_x += static_cast<double>(hist_x[c]) * psi;
        sum_y += static_cast<double>(hist_y[c]) * psi;
    }

    MiEstimate est;
    est.value = digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) -
                (sum_x + sum_y) / static_cast<double>(n);
    est.n = n;
    est.k = k;
    return est;
}

}  // namespace mirate
