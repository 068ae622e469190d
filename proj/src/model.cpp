#include "ningarch/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ningarch {

int CountSeries::covariate_index(const std::string& name) const {
    for (int c = 0; c < int(covariate_names.size()); ++c)
        if (covariate_names[c] == name) return c;
    throw std::out_of_range("unknown covariate column: " + name);
}

double CountSeries::mean() const {
    if (y.empty()) throw std::invalid_argument("empty series");
    return std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
}

void CountSeries::validate() const {
    if (y.empty()) throw std::invalid_argument("empty series");
    for (int v : y) {
        if (v < 0) throw std::invalid_argument("negative count in series");
        if (bound && v > *bound) throw std::invalid_argument("count exceeds declared bound");
    }
    if (covariates.size() > 0 && covariates.rows() != length())
        throw std::invalid_argument("covariate rows do not match series length");
    if (int(covariate_names.size()) != covariates.cols())
        throw std::invalid_argument("covariate names do not match columns");
}

void ModelSpec::validate() const {
    if (p < 0 || q < 0) throw std::invalid_argument("negative model order");
    if (response.neural() && response.hidden < 1)
        throw std::invalid_argument("neural response needs at least one hidden unit");
    if (!scaling.empty() && int(scaling.size()) != input_dim())
        throw std::invalid_argument("scaling vector does not match input dimension");
    if (family.bounded() && family.bound < 1)
        throw std::invalid_argument("bounded family without a positive bound");
}

std::vector<std::string> input_names(const ModelSpec& spec) {
    std::vector<std::string> names{"const"};
    for (int i = 1; i <= spec.p; ++i) names.push_back("y_lag" + std::to_string(i));
    for (int i = 1; i <= spec.q; ++i) names.push_back("mean_lag" + std::to_string(i));
    for (const auto& c : spec.covariate_columns) names.push_back(c);
    return names;
}

void set_default_scaling(ModelSpec& spec, const CountSeries& series) {
    spec.scaling.assign(spec.input_dim(), InputScale{});
    const int base = 1 + spec.p + spec.q;
    for (int i = 0; i < int(spec.covariate_columns.size()); ++i) {
        const auto col = series.covariates.col(series.covariate_index(spec.covariate_columns[i]));
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (hi > lo)
            spec.scaling[base + i] = InputScale{-lo / (hi - lo), 1.0 / (hi - lo)};
    }
}

FamilySpec effective_family(const ModelSpec& spec, const Eigen::VectorXd& params) {
    if (!spec.family.has_aux()) return spec.family;
    return spec.family.with_aux(params[spec.response_params()]);
}

namespace {

double initial_mean(const ModelSpec& spec, const CountSeries& series) {
    double m = series.mean();
    if (spec.family.bounded()) m /= double(spec.family.bound);
    return m;
}

void check_mean_domain(const ModelSpec& spec, double m, int t) {
    if (!std::isfinite(m)) throw FilterError(t, "non-finite conditional parameter");
    if (spec.family.bounded()) {
        if (m <= 0.0 || m >= 1.0)
            throw FilterError(t, "conditional probability left (0,1) at t=" + std::to_string(t));
    } else if (m <= 0.0) {
        throw FilterError(t, "conditional mean left (0,inf) at t=" + std::to_string(t));
    }
}

}  // namespace

Eigen::VectorXd build_input(const CountSeries& series, const ModelSpec& spec, int t,
                            const std::vector<double>& past_means) {
    if (t < spec.p || t >= series.length())
        throw std::out_of_range("time index out of filtering range");
    if (int(past_means.size()) < spec.q)
        throw std::invalid_argument("not enough lagged means supplied");
    const int J = spec.input_dim();
    Eigen::VectorXd x(J);
    x[0] = 1.0;
    for (int i = 1; i <= spec.p; ++i)
        x[i] = spec.scale_for(i).apply(double(series.y[t - i]));
    for (int i = 1; i <= spec.q; ++i)
        x[spec.p + i] = spec.scale_for(spec.p + i).apply(past_means[i - 1]);
    const int base = 1 + spec.p + spec.q;
    for (int c = 0; c < int(spec.covariate_columns.size()); ++c) {
        const int col = series.covariate_index(spec.covariate_columns[c]);
        x[base + c] = spec.scale_for(base + c).apply(series.covariates(t, col));
    }
    return x;
}

FilterOutput filter(const ModelSpec& spec, const Eigen::VectorXd& params,
                    const CountSeries& series) {
    spec.validate();
    series.validate();
    const int T = series.length();
    if (T <= spec.p) throw std::invalid_argument("series shorter than model order");
    const int nw = spec.response_params();
    if (params.size() != spec.total_params() && params.size() != nw)
        throw std::invalid_argument("parameter vector does not match model spec");
    const Eigen::VectorXd w = params.head(nw);

    FilterOutput out;
    out.effective_T = T - spec.p;
    out.means.resize(out.effective_T);
    out.inputs.resize(out.effective_T, spec.input_dim());

    // mean lags before the first filtered step sit at the sample mean
    std::vector<double> past(spec.q, initial_mean(spec, series));
    for (int t = spec.p; t < T; ++t) {
        const Eigen::VectorXd x = build_input(series, spec, t, past);
        const double m = forward(spec.response, w, x).output;
        check_mean_domain(spec, m, t);
        out.inputs.row(t - spec.p) = x;
        out.means[t - spec.p] = m;
        if (spec.q > 0) {
            past.insert(past.begin(), m);
            past.pop_back();
        }
    }
    return out;
}

double loglik(const ModelSpec& spec, const Eigen::VectorXd& params,
              const CountSeries& series) {
    const FilterOutput f = filter(spec, params, series);
    const FamilySpec fam = effective_family(spec, params);
    double ll = 0.0;
    for (int i = 0; i < f.effective_T; ++i)
        ll += log_pmf(fam, series.y[spec.p + i], f.means[i]);
    return ll;
}

Eigen::VectorXd loglik_grad(const ModelSpec& spec, const Eigen::VectorXd& params,
                            const CountSeries& series) {
    spec.validate();
    series.validate();
    const int T = series.length();
    const int nw = spec.response_params();
    const Eigen::VectorXd w = params.head(nw);
    const FamilySpec fam = effective_family(spec, params);
    const bool aux = spec.family.has_aux();

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(spec.total_params());
    std::vector<double> past(spec.q, initial_mean(spec, series));
    // sensitivity of each lagged mean to the weights (q > 0 only);
    // the initial lags are data constants, so sensitivities start at zero
    std::vector<Eigen::VectorXd> sens(spec.q, Eigen::VectorXd::Zero(nw));

    for (int t = spec.p; t < T; ++t) {
        const Eigen::VectorXd x = build_input(series, spec, t, past);
        const ForwardState state = forward(spec.response, w, x);
        check_mean_domain(spec, state.output, t);

        Eigen::VectorXd dm = backward(spec.response, w, x, state, 1.0);
        if (spec.q > 0) {
            const Eigen::VectorXd gx = input_gradient(spec.response, w, x, state);
            for (int i = 1; i <= spec.q; ++i)
                dm += gx[spec.p + i] * spec.scale_for(spec.p + i).factor * sens[i - 1];
        }

        const double sc = score_wrt_mean(fam, series.y[t], state.output);
        grad.head(nw) += sc * dm;
        if (aux) grad[nw] += score_wrt_aux(fam, series.y[t], state.output);

        if (spec.q > 0) {
            past.insert(past.begin(), state.output);
            past.pop_back();
            sens.insert(sens.begin(), std::move(dm));
            sens.pop_back();
        }
    }
    return grad;
}

}  // namespace ningarch
