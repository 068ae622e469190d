#pragma once

#include <cstdint>
#include <optional>

#include "ningarch/model.hpp"

namespace ningarch {

struct SimulationError : std::runtime_error {
    int t;
    SimulationError(int t_, const std::string& what) : std::runtime_error(what), t(t_) {}
};

struct SimConfig {
    ModelSpec spec;
    Eigen::VectorXd params;  ///< response weights, then alpha/omega if present
    int length = 0;
    int burn_in = 500;
    std::uint64_t seed = 1;
    /// Covariate rows for the reported sample (length x C). During burn-in
    /// the first row is held fixed. Empty when the spec has no covariates.
    Eigen::MatrixXd covariates;
};

/// Iterates the conditional-mean recursion, drawing each count from the
/// family's pmf. Deterministic given the seed (mt19937_64). Count lags start
/// at zero and mean lags at the response value of the all-zero-lag input;
/// burn-in discards the initialization transient.
CountSeries simulate(const SimConfig& config);

}  // namespace ningarch
