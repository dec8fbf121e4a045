#include "mirate/digamma.hpp"

#include <cmath>

#include "mirate/errors.hpp"

namespace mirate {

namespace {

// Below this the asymptotic series is not used; recurrence lifts x past it.
constexpr double kAsymptoticThreshold = 10.0;

// Coefficients B_2n / (2n) of the asymptotic expansion
// psi(x) ~ ln x - 1/(2x) - sum_n B_2n / (2n x^2n).
constexpr double kBernoulliTerms[] = {
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
};

}  // namespace

double digamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError("digamma: argument must be positive and finite");
    }

    // psi(x) = psi(x + n) - sum_{i<n} 1/(x + i)
    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift -= 1.0 / x;
        x += 1.0;
    }

    const double inv2 = 1.0 / (x * x);
    double tail = 0.0;
    double power = inv2;
    for (double c : kBernoulliTerms) {
        tail += c * power;
        power *= inv2;
    }
    return shift + std::log(x) - 0.5 / x - tail;
}

}  // namespace mirate
