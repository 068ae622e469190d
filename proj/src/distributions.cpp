#include "ningarch/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ningarch {

namespace {

constexpr double kInteriorMargin = 1e-10;
constexpr int kLogFactTableSize = 10001;

// Clamp a probability into the open interval; reject values outside [0,1].
double checked_probability(double p) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw std::domain_error("success probability outside [0,1]");
    return std::clamp(p, kInteriorMargin, 1.0 - kInteriorMargin);
}

double checked_rate(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::domain_error("rate parameter must be non-negative and finite");
    return std::max(lambda, kInteriorMargin);
}

void check_support(const FamilySpec& spec, int k) {
    if (k < 0) throw std::out_of_range("count must be non-negative");
    if (spec.bounded() && k > spec.bound)
        throw std::out_of_range("count exceeds the binomial bound");
}

void check_aux(const FamilySpec& spec) {
    if (spec.family == Family::GeneralizedPoisson && !(spec.alpha > 0.0))
        throw std::domain_error("generalized Poisson requires alpha > 0");
    if (spec.family == Family::ZeroInflatedBinomial &&
        !(spec.omega >= 0.0 && spec.omega < 1.0))
        throw std::domain_error("ZIB requires omega in [0,1)");
    if (spec.bounded() && spec.bound < 1)
        throw std::domain_error("binomial families require a positive bound");
}

double log_binomial_coefficient(int n, int k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial_log_pmf(int n, int k, double p) {
    return log_binomial_coefficient(n, k) + k * std::log(p) + (n - k) * std::log1p(-p);
}

}  // namespace

double FamilySpec::aux() const {
    switch (family) {
        case Family::GeneralizedPoisson: return alpha;
        case Family::ZeroInflatedBinomial: return omega;
        default: throw UnsupportedFamilyError("family has no auxiliary parameter");
    }
}

FamilySpec FamilySpec::with_aux(double value) const {
    FamilySpec out = *this;
    switch (family) {
        case Family::GeneralizedPoisson: out.alpha = value; break;
        case Family::ZeroInflatedBinomial: out.omega = value; break;
        default: throw UnsupportedFamilyError("family has no auxiliary parameter");
    }
    return out;
}

double log_factorial(int k) {
    if (k < 0) throw std::out_of_range("log_factorial of a negative integer");
    static const std::vector<double> table = [] {
        std::vector<double> t(kLogFactTableSize);
        t[0] = 0.0;
        for (int i = 1; i < kLogFactTableSize; ++i) t[i] = t[i - 1] + std::log(double(i));
        return t;
    }();
    if (k < kLogFactTableSize) return table[k];
    return std::lgamma(double(k) + 1.0);
}

double log_pmf(const FamilySpec& spec, int k, double mean_param) {
    check_support(spec, k);
    check_aux(spec);
    switch (spec.family) {
        case Family::Poisson: {
            const double lambda = checked_rate(mean_param);
            return k * std::log(lambda) - lambda - log_factorial(k);
        }
        case Family::GeneralizedPoisson: {
            const double lambda = checked_rate(mean_param);
            const double a = spec.alpha;
            const double denom = 1.0 + a * lambda;
            return k * (std::log(lambda) - std::log(denom)) +
                   (k - 1) * std::log1p(a * k) - log_factorial(k) -
                   lambda * (1.0 + a * k) / denom;
        }
        case Family::Binomial: {
            const double p = checked_probability(mean_param);
            return binomial_log_pmf(spec.bound, k, p);
        }
        case Family::ZeroInflatedBinomial: {
            const double p = checked_probability(mean_param);
            const double lb = binomial_log_pmf(spec.bound, k, p);
            if (spec.omega == 0.0) return lb;  // exact binomial path
            if (k > 0) return std::log1p(-spec.omega) + lb;
            // log(omega + (1-omega) * (1-p)^n) via log-sum-exp
            const double la = std::log(spec.omega);
            const double lz = std::log1p(-spec.omega) + spec.bound * std::log1p(-p);
            const double m = std::max(la, lz);
            return m + std::log(std::exp(la - m) + std::exp(lz - m));
        }
    }
    throw std::logic_error("unknown family");
}

std::pair<double, double> moments(const FamilySpec& spec, double mean_param) {
    check_aux(spec);
    switch (spec.family) {
        case Family::Poisson: {
            const double lambda = checked_rate(mean_param);
            return {lambda, lambda};
        }
        case Family::GeneralizedPoisson: {
            const double lambda = checked_rate(mean_param);
            const double s = 1.0 + spec.alpha * lambda;
            return {lambda, lambda * s * s};
        }
        case Family::Binomial: {
            const double p = checked_probability(mean_param);
            const double n = spec.bound;
            return {n * p, n * p * (1.0 - p)};
        }
        case Family::ZeroInflatedBinomial: {
            const double p = checked_probability(mean_param);
            const double n = spec.bound;
            const double w = spec.omega;
            const double pi = (1.0 - w) * p;
            const double var =
                n * pi * (1.0 - pi) + n * (n - 1.0) * (w / (1.0 - w)) * pi * pi;
            return {n * pi, var};
        }
    }
    throw std::logic_error("unknown family");
}

double score_wrt_mean(const FamilySpec& spec, int k, double mean_param) {
    check_support(spec, k);
    check_aux(spec);
    switch (spec.family) {
        case Family::Poisson: {
            const double lambda = checked_rate(mean_param);
            return k / lambda - 1.0;
        }
        case Family::GeneralizedPoisson: {
            const double lambda = checked_rate(mean_param);
            const double a = spec.alpha;
            const double denom = 1.0 + a * lambda;
            return k * (1.0 / lambda - a / denom) - (1.0 + a * k) / (denom * denom);
        }
        case Family::Binomial: {
            const double p = checked_probability(mean_param);
            return k / p - (spec.bound - k) / (1.0 - p);
        }
        case Family::ZeroInflatedBinomial: {
            const double p = checked_probability(mean_param);
            const int n = spec.bound;
            if (k > 0 || spec.omega == 0.0) return k / p - (n - k) / (1.0 - p);
            const double b0 = std::exp(n * std::log1p(-p));  // (1-p)^n
            const double pmf0 = spec.omega + (1.0 - spec.omega) * b0;
            return -(1.0 - spec.omega) * n * b0 / (1.0 - p) / pmf0;
        }
    }
    throw std::logic_error("unknown family");
}

double score_wrt_aux(const FamilySpec& spec, int k, double mean_param) {
    check_support(spec, k);
    check_aux(spec);
    switch (spec.family) {
        case Family::GeneralizedPoisson: {
            const double lambda = checked_rate(mean_param);
            const double a = spec.alpha;
            const double denom = 1.0 + a * lambda;
            return -k * lambda / denom + double(k) * (k - 1) / (1.0 + a * k) -
                   lambda * (k - lambda) / (denom * denom);
        }
        case Family::ZeroInflatedBinomial: {
            const double p = checked_probability(mean_param);
            if (k > 0) return -1.0 / (1.0 - spec.omega);
            const double b0 = std::exp(spec.bound * std::log1p(-p));
            const double pmf0 = spec.omega + (1.0 - spec.omega) * b0;
            return (1.0 - b0) / pmf0;
        }
        default:
            throw UnsupportedFamilyError("family has no auxiliary parameter");
    }
}

namespace {

// Inversion sampler for Poisson: multiplicative pmf recurrence in log space.
int sample_poisson(double lambda, double u) {
    double lp = -lambda;  // log pmf at k = 0
    double cum = std::exp(lp);
    int k = 0;
    const int kmax = int(lambda + 20.0 * std::sqrt(lambda)) + 1024;
    while (cum < u && k < kmax) {
        ++k;
        lp += std::log(lambda) - std::log(double(k));
        cum += std::exp(lp);
    }
    return k;
}

int sample_gp(const FamilySpec& spec, double lambda, double u) {
    const auto [mean, var] = moments(spec, lambda);
    const int kmax = int(mean + 20.0 * std::sqrt(var)) + 1024;
    double cum = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        cum += std::exp(log_pmf(spec, k, lambda));
        if (cum >= u || cum >= 1.0 - 1e-12) return k;
    }
    return kmax;
}

int sample_binomial(int n, double p, double u) {
    double pmf = std::exp(n * std::log1p(-p));
    double cum = pmf;
    int k = 0;
    const double odds = p / (1.0 - p);
    while (cum < u && k < n) {
        pmf *= odds * double(n - k) / double(k + 1);
        ++k;
        cum += pmf;
    }
    return k;
}

}  // namespace

int sample(const FamilySpec& spec, double mean_param, std::mt19937_64& rng) {
    check_aux(spec);
    const double u = uniform01(rng);
    switch (spec.family) {
        case Family::Poisson:
            return sample_poisson(checked_rate(mean_param), u);
        case Family::GeneralizedPoisson:
            return sample_gp(spec, checked_rate(mean_param), u);
        case Family::Binomial:
            return sample_binomial(spec.bound, checked_probability(mean_param), u);
        case Family::ZeroInflatedBinomial: {
            const double p = checked_probability(mean_param);
            if (u < spec.omega) return 0;
            return sample_binomial(spec.bound, p, uniform01(rng));
        }
    }
    throw std::logic_error("unknown family");
}

}  // namespace ningarch
