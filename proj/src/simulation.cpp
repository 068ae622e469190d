#include "ningarch/simulation.hpp"

#include <cmath>

namespace ningarch {

CountSeries simulate(const SimConfig& config) {
    const ModelSpec& spec = config.spec;
    spec.validate();
    if (config.length < 1) throw std::invalid_argument("simulation length must be >= 1");
    if (config.burn_in < std::max(spec.p, spec.q))
        throw std::invalid_argument("burn_in must cover the model order");
    const int n_cov = int(spec.covariate_columns.size());
    if (n_cov > 0 && (config.covariates.rows() != config.length ||
                      config.covariates.cols() != n_cov))
        throw std::invalid_argument("covariate matrix does not match spec and length");
    if (config.params.size() != spec.total_params())
        throw std::invalid_argument("parameter vector does not match model spec");

    const Eigen::VectorXd w = config.params.head(spec.response_params());
    const FamilySpec fam = effective_family(spec, config.params);
    const int J = spec.input_dim();
    std::mt19937_64 rng(config.seed);

    std::vector<int> y_lags(spec.p, 0);
    // mean lags start at the response value of the all-zero-lag input
    std::vector<double> m_lags;
    if (spec.q > 0) {
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(J);
        x0[0] = 1.0;
        for (int c = 0; c < n_cov; ++c)
            x0[1 + spec.p + spec.q + c] =
                spec.scale_for(1 + spec.p + spec.q + c).apply(config.covariates(0, c));
        m_lags.assign(spec.q, forward(spec.response, w, x0).output);
    }

    CountSeries out;
    out.y.reserve(config.length);
    if (fam.bounded()) out.bound = fam.bound;
    out.covariate_names = spec.covariate_columns;
    out.covariates = config.covariates;
    out.origin = "simulated";

    const int total = config.burn_in + config.length;
    for (int t = 0; t < total; ++t) {
        Eigen::VectorXd x(J);
        x[0] = 1.0;
        for (int i = 1; i <= spec.p; ++i)
            x[i] = spec.scale_for(i).apply(double(y_lags[i - 1]));
        for (int i = 1; i <= spec.q; ++i)
            x[spec.p + i] = spec.scale_for(spec.p + i).apply(m_lags[i - 1]);
        const int cov_row = std::max(0, t - config.burn_in);
        for (int c = 0; c < n_cov; ++c)
            x[1 + spec.p + spec.q + c] =
                spec.scale_for(1 + spec.p + spec.q + c).apply(config.covariates(cov_row, c));

        const double m = forward(spec.response, w, x).output;
        if (!std::isfinite(m) || m <= 0.0 || (fam.bounded() && m >= 1.0))
            throw SimulationError(t, "conditional parameter left its domain at t=" +
                                         std::to_string(t));
        int draw;
        try {
            draw = sample(fam, m, rng);
        } catch (const std::domain_error& e) {
            throw SimulationError(t, e.what());
        }
        if (t >= config.burn_in) out.y.push_back(draw);

        if (spec.p > 0) {
            y_lags.insert(y_lags.begin(), draw);
            y_lags.pop_back();
        }
        if (spec.q > 0) {
            m_lags.insert(m_lags.begin(), m);
            m_lags.pop_back();
        }
    }
    return out;
}

}  // namespace ningarch
