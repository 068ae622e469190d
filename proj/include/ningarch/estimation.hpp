#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ningarch/model.hpp"

namespace ningarch {

struct FitOptions {
    int restarts = 20;
    std::uint64_t seed = 1;
    double init_scale = 1.0;
    int max_iterations = 2000;
    double grad_tolerance = 1e-6;
    double step_tolerance = 1e-9;
};

struct RestartRecord {
    int index = 0;
    std::uint64_t seed = 0;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string status;
};

struct FitResult {
    ModelSpec spec;
    Eigen::VectorXd params;  ///< response weights, then alpha/omega if present
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    int k_params = 0;
    int effective_T = 0;
    Eigen::MatrixXd hessian;  ///< of the negative log-likelihood at the optimum
    bool converged = false;
    std::vector<RestartRecord> restart_log;
};

struct ConvergenceError : std::runtime_error {
    std::vector<RestartRecord> restart_log;
    ConvergenceError(std::string what, std::vector<RestartRecord> log)
        : std::runtime_error(std::move(what)), restart_log(std::move(log)) {}
};

/// aic = -2 ll + 2k, bic = -2 ll + k ln(t_eff)
std::pair<double, double> information_criteria(double loglik, int k, int t_eff);

/// Maximum likelihood by multi-start BFGS on the exact gradient. Auxiliary
/// parameters are optimized through smooth bijections (alpha = exp a,
/// omega = logistic b) so the search stays unconstrained; the returned
/// estimates and Hessian are in the original parameterization.
FitResult fit(const CountSeries& series, const ModelSpec& spec, const FitOptions& options);

/// Central finite differences of a gradient, symmetrized. Steps are
/// sqrt(eps) * (1 + |x_i|).
Eigen::MatrixXd numerical_hessian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const Eigen::VectorXd& point);

/// Hessian of the negative log-likelihood at `params`.
Eigen::MatrixXd numerical_hessian(const CountSeries& series, const ModelSpec& spec,
                                  const Eigen::VectorXd& params);

struct CandidateRow {
    int p = 0, q = 0, hidden = 0;
    double loglik = 0.0, aic = 0.0, bic = 0.0;
    int k_params = 0, effective_T = 0;
    bool converged = false;
    std::string error;  ///< non-empty when the candidate fit failed
};

struct SelectionTable {
    std::vector<CandidateRow> rows;  ///< sorted by AIC among successful fits
    int hidden_cap = -1;             ///< rule-of-thumb cap, select_hidden only
};

/// Drops the first `head` observations (and covariate rows).
CountSeries trim_head(const CountSeries& series, int head);

/// Ranks candidate orders for the degenerate model of `base`. All candidates
/// are fit on the sample aligned to the largest candidate p so the criteria
/// are comparable.
SelectionTable select_order(const CountSeries& series, const ModelSpec& base,
                            const std::vector<std::pair<int, int>>& candidates,
                            const FitOptions& options);

/// Ranks hidden-layer sizes for the neural model of `base` and reports the
/// ten-observations-per-parameter cap floor(0.1 T / (J+1)).
SelectionTable select_hidden(const CountSeries& series, const ModelSpec& base,
                             const std::vector<int>& h_range, const FitOptions& options);

}  // namespace ningarch
