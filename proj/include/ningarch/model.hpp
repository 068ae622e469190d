#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ningarch/distributions.hpp"
#include "ningarch/network.hpp"

namespace ningarch {

/// Observed count series with optional bound and exogenous covariates.
struct CountSeries {
    std::vector<int> y;
    std::optional<int> bound;
    std::vector<std::string> covariate_names;
    Eigen::MatrixXd covariates;  ///< T x C, row t aligned with y[t]
    std::string origin;

    int length() const { return int(y.size()); }
    int covariate_index(const std::string& name) const;
    double mean() const;
    void validate() const;
};

/// Affine transform applied to one input slot: x = offset + factor * raw.
struct InputScale {
    double offset = 0.0;
    double factor = 1.0;
    double apply(double raw) const { return offset + factor * raw; }
};

struct ModelSpec {
    int p = 1;
    int q = 0;
    ResponseSpec response;
    FamilySpec family;
    std::vector<std::string> covariate_columns;
    std::vector<InputScale> scaling;  ///< length J; empty means identity

    /// J = 1 + p + q + number of covariates
    int input_dim() const { return 1 + p + q + int(covariate_columns.size()); }
    int response_params() const { return response.param_count(input_dim()); }
    int total_params() const { return response_params() + (family.has_aux() ? 1 : 0); }
    InputScale scale_for(int slot) const {
        return scaling.empty() ? InputScale{} : scaling.at(slot);
    }
    void validate() const;
};

/// Human-readable name per input slot: const, y_lag1.., mean_lag1.., covariates.
std::vector<std::string> input_names(const ModelSpec& spec);

/// Sets covariate scaling so each covariate column maps its observed
/// [min,max] onto [0,1]; lag slots are left raw.
void set_default_scaling(ModelSpec& spec, const CountSeries& series);

struct FilterError : std::runtime_error {
    int t;
    FilterError(int t_, const std::string& what) : std::runtime_error(what), t(t_) {}
};

struct FilterOutput {
    Eigen::VectorXd means;   ///< conditional mean parameter for t = p..T-1
    Eigen::MatrixXd inputs;  ///< effective_T x J, the vectors fed to the response
    int effective_T = 0;     ///< T - p
};

/// Input vector at time t (0-based, t >= p). past_means[i] is the conditional
/// parameter at t-1-i; required length q.
Eigen::VectorXd build_input(const CountSeries& series, const ModelSpec& spec, int t,
                            const std::vector<double>& past_means);

/// Filters conditional parameters through t = p..T-1. For q > 0 the mean lags
/// before the first filtered step are initialized at the unconditional sample
/// mean of y (sample proportion for bounded families).
FilterOutput filter(const ModelSpec& spec, const Eigen::VectorXd& params,
                    const CountSeries& series);

/// Conditional log-likelihood with full constants, so AIC/BIC are absolute.
/// `params` = response weights followed by alpha/omega when the family has one.
double loglik(const ModelSpec& spec, const Eigen::VectorXd& params,
              const CountSeries& series);

/// Exact gradient of loglik in the flat layout. For q > 0 the recursive
/// dependence of the conditional parameter on the weights is tracked by
/// forward accumulation of its sensitivity through the mean lags.
Eigen::VectorXd loglik_grad(const ModelSpec& spec, const Eigen::VectorXd& params,
                            const CountSeries& series);

/// Family spec with its auxiliary parameter taken from the parameter vector.
FamilySpec effective_family(const ModelSpec& spec, const Eigen::VectorXd& params);

}  // namespace ningarch
