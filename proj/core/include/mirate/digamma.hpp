#pragma once

namespace mirate {

/// Digamma function psi(x) = d/dx ln Gamma(x), for x > 0.
/// Absolute error below 1e-12 for x >= 1e-3. Throws DomainError otherwise.
double digamma(double x);

}  // namespace mirate
