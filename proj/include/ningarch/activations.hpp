#pragma once

#include <cmath>
#include <stdexcept>

namespace ningarch {

/// Scalar activation functions used for hidden layers (logistic) and
/// output layers (softplus for unbounded counts, logistic for probabilities,
/// identity for exactly linear baselines).
enum class Activation { Logistic, Softplus, Identity };

namespace detail {
inline void require_finite(double x) {
    if (!std::isfinite(x)) throw std::domain_error("activation input must be finite");
}
}  // namespace detail

inline double logistic(double x) {
    // stable for large |x|: never exponentiates a positive argument
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double softplus(double x) {
    // softplus(x) = max(x,0) + log1p(exp(-|x|))
    return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

inline double activation_eval(Activation kind, double x) {
    detail::require_finite(x);
    switch (kind) {
        case Activation::Logistic: return logistic(x);
        case Activation::Softplus: return softplus(x);
        case Activation::Identity: return x;
    }
    throw std::logic_error("unknown activation");
}

/// Exact first derivative. Softplus' = logistic, logistic' = logistic(1-logistic).
inline double activation_deriv(Activation kind, double x) {
    detail::require_finite(x);
    switch (kind) {
        case Activation::Logistic: {
            const double g = logistic(x);
            return g * (1.0 - g);
        }
        case Activation::Softplus: return logistic(x);
        case Activation::Identity: return 1.0;
    }
    throw std::logic_error("unknown activation");
}

}  // namespace ningarch
