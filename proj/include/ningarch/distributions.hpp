#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>

namespace ningarch {

enum class Family { Poisson, GeneralizedPoisson, Binomial, ZeroInflatedBinomial };

/// Conditional count distribution with its fixed bound and auxiliary
/// parameters. `alpha` (overdispersion) is only meaningful for the
/// generalized Poisson, `omega` (zero inflation) only for the ZIB.
struct FamilySpec {
    Family family = Family::Poisson;
    int bound = 0;        ///< n, binomial families only
    double alpha = 0.0;   ///< GP dispersion, > 0
    double omega = 0.0;   ///< ZIB inflation, in [0,1)

    bool bounded() const {
        return family == Family::Binomial || family == Family::ZeroInflatedBinomial;
    }
    bool has_aux() const {
        return family == Family::GeneralizedPoisson || family == Family::ZeroInflatedBinomial;
    }
    /// Current auxiliary parameter value (alpha or omega).
    double aux() const;
    FamilySpec with_aux(double value) const;
};

struct UnsupportedFamilyError : std::logic_error {
    using std::logic_error::logic_error;
};

/// ln k! via a precomputed table (k <= 10^4), lgamma beyond.
double log_factorial(int k);

/// Natural log of the probability mass at k. `mean_param` is lambda for
/// Poisson/GP and the success probability p for binomial families.
double log_pmf(const FamilySpec& spec, int k, double mean_param);

/// (mean, variance) of the conditional distribution.
std::pair<double, double> moments(const FamilySpec& spec, double mean_param);

/// d/d(mean_param) log_pmf.
double score_wrt_mean(const FamilySpec& spec, int k, double mean_param);

/// d/d(aux) log_pmf, aux = alpha (GP) or omega (ZIB).
/// Throws UnsupportedFamilyError for Poisson/Binomial.
double score_wrt_aux(const FamilySpec& spec, int k, double mean_param);

/// Exact draw from the conditional pmf. Poisson and GP by inversion over
/// the cumulative pmf, binomial by inversion over k = 0..n, ZIB by a
/// mixture draw followed by a binomial draw. Uniforms are derived from the
/// top 53 bits of mt19937_64 output, so seeds are portable across platforms.
int sample(const FamilySpec& spec, double mean_param, std::mt19937_64& rng);

/// Uniform in [0,1) from the generator's top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ningarch
