#pragma once

#include <string>
#include <vector>

#include "ningarch/estimation.hpp"

namespace ningarch {

struct InferenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResidualSummary {
    double mean = 0.0;
    double variance = 0.0;          ///< denominator N
    std::vector<double> acf;        ///< lags 1..L
    double critical_value = 0.0;    ///< 1.96 / sqrt(effective_T)
};

struct EffectCurve {
    std::string varying_input;
    std::vector<double> grid;            ///< raw values of the varying input
    Eigen::VectorXd fixed_context;       ///< raw values of the remaining inputs
    std::vector<double> predicted_mean;  ///< conditional mean (n*P when bounded)
    std::vector<double> success_prob;    ///< bounded families only, else empty
    std::vector<double> ci_low, ci_high;
    double level = 0.9;
    bool ridged = false;  ///< delta-method Hessian needed a ridge
};

struct CiBand {
    double mean = 0.0;       ///< conditional mean (n*P when bounded)
    double low = 0.0, high = 0.0;
    double variance = 0.0;   ///< delta-method variance of the mean
    bool ridged = false;
};

/// Standard-normal quantile (Acklam's rational approximation, |err| < 1e-9).
double normal_quantile(double prob);

/// Pearson residuals r_t = (y_t - mu_t) / sqrt(v_t) for t = p..T-1.
std::vector<double> pearson_residuals(const CountSeries& series, const FitResult& fit);

/// Sample autocorrelation at lags 1..max_lag, denominator sum (v - vbar)^2.
std::vector<double> acf(const std::vector<double>& values, int max_lag);

ResidualSummary residual_summary(const std::vector<double>& residuals, int max_lag,
                                 int effective_T);

/// Raw inputs fixed at their sample values: count lags at mean(y), mean lags
/// at the average fitted conditional parameter, covariates at column means.
Eigen::VectorXd mean_context(const CountSeries& series, const FitResult& fit);

/// Conditional mean parameter (lambda or P) at a raw input vector;
/// applies the spec's input scaling before the response.
double predict_param(const FitResult& fit, const Eigen::VectorXd& raw_x);

/// Delta-method pointwise confidence band for the conditional mean at a raw
/// input vector: variance = grad f^T Hinv grad f with the fitted Hessian of
/// the negative log-likelihood. Falls back to a ridged Hessian
/// (H + eps*I, eps = 1e-8 tr(H)/k) when the plain solve is unusable.
CiBand ci_band(const FitResult& fit, const Eigen::VectorXd& raw_x, double level);

/// Conditional-mean curve in one input, all others fixed at `context`.
EffectCurve marginal_effect_curve(const FitResult& fit, const std::string& varying,
                                  const std::vector<double>& grid,
                                  const Eigen::VectorXd& context, double level = 0.9);

/// P(Y = 0 | all count lags = 0, context) under the fitted model.
double zero_state_probability(const FitResult& fit, const Eigen::VectorXd& context);

}  // namespace ningarch
