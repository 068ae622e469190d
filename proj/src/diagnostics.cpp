#include "ningarch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ningarch {

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::domain_error("quantile probability must be in (0,1)");
    // Acklam's rational approximation
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (prob < plow) {
        const double u = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else if (prob > 1.0 - plow) {
        const double u = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else {
        const double u = prob - 0.5;
        const double r = u * u;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    return x;
}

std::vector<double> pearson_residuals(const CountSeries& series, const FitResult& fit) {
    const FilterOutput f = filter(fit.spec, fit.params, series);
    const FamilySpec fam = effective_family(fit.spec, fit.params);
    std::vector<double> r(f.effective_T);
    for (int i = 0; i < f.effective_T; ++i) {
        const auto [mu, var] = moments(fam, f.means[i]);
        if (!(var > 0.0))
            throw std::runtime_error("zero conditional variance at t=" +
                                     std::to_string(fit.spec.p + i));
        r[i] = (series.y[fit.spec.p + i] - mu) / std::sqrt(var);
    }
    return r;
}

std::vector<double> acf(const std::vector<double>& values, int max_lag) {
    const int n = int(values.size());
    if (n <= max_lag) throw std::invalid_argument("series shorter than max_lag");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double denom = 0.0;
    for (double v : values) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw std::invalid_argument("ACF undefined for constant series");
    std::vector<double> out(max_lag);
    for (int lag = 1; lag <= max_lag; ++lag) {
        double num = 0.0;
        for (int t = lag; t < n; ++t)
            num += (values[t] - mean) * (values[t - lag] - mean);
        out[lag - 1] = num / denom;
    }
    return out;
}

ResidualSummary residual_summary(const std::vector<double>& residuals, int max_lag,
                                 int effective_T) {
    if (residuals.empty()) throw std::invalid_argument("empty residual vector");
    ResidualSummary s;
    const int n = int(residuals.size());
    s.mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / n;
    for (double r : residuals) s.variance += (r - s.mean) * (r - s.mean);
    s.variance /= n;
    s.acf = acf(residuals, max_lag);
    s.critical_value = 1.96 / std::sqrt(double(effective_T));
    return s;
}

Eigen::VectorXd mean_context(const CountSeries& series, const FitResult& fit) {
    const ModelSpec& spec = fit.spec;
    const FilterOutput f = filter(spec, fit.params, series);
    Eigen::VectorXd ctx(spec.input_dim());
    ctx[0] = 1.0;
    const double ybar = series.mean();
    for (int i = 1; i <= spec.p; ++i) ctx[i] = ybar;
    const double mbar = f.means.mean();
    for (int i = 1; i <= spec.q; ++i) ctx[spec.p + i] = mbar;
    const int base = 1 + spec.p + spec.q;
    for (int c = 0; c < int(spec.covariate_columns.size()); ++c)
        ctx[base + c] =
            series.covariates.col(series.covariate_index(spec.covariate_columns[c])).mean();
    return ctx;
}

namespace {

Eigen::VectorXd scale_inputs(const ModelSpec& spec, const Eigen::VectorXd& raw) {
    if (raw.size() != spec.input_dim())
        throw std::invalid_argument("context does not match input dimension");
    Eigen::VectorXd x(raw.size());
    x[0] = 1.0;
    for (int j = 1; j < raw.size(); ++j) x[j] = spec.scale_for(j).apply(raw[j]);
    return x;
}

}  // namespace

double predict_param(const FitResult& fit, const Eigen::VectorXd& raw_x) {
    const Eigen::VectorXd x = scale_inputs(fit.spec, raw_x);
    const Eigen::VectorXd w = fit.params.head(fit.spec.response_params());
    return forward(fit.spec.response, w, x).output;
}

CiBand ci_band(const FitResult& fit, const Eigen::VectorXd& raw_x, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("confidence level must be in (0,1)");
    if (fit.hessian.rows() != fit.k_params)
        throw InferenceError("fit carries no Hessian");
    const ModelSpec& spec = fit.spec;
    const Eigen::VectorXd x = scale_inputs(spec, raw_x);
    const Eigen::VectorXd w = fit.params.head(spec.response_params());
    const double param = forward(spec.response, w, x).output;

    Eigen::VectorXd g = Eigen::VectorXd::Zero(fit.k_params);
    g.head(spec.response_params()) = param_gradient(spec.response, w, x);

    CiBand band;
    auto quad_form = [&](const Eigen::MatrixXd& H) -> double {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() != Eigen::Success) return -1.0;
        return g.dot(ldlt.solve(g));
    };
    double var = quad_form(fit.hessian);
    if (!(var >= 0.0) || !std::isfinite(var)) {
        const double eps = 1e-8 * fit.hessian.trace() / fit.k_params;
        var = quad_form(fit.hessian + eps * Eigen::MatrixXd::Identity(fit.k_params,
                                                                      fit.k_params));
        band.ridged = true;
        if (!(var >= 0.0) || !std::isfinite(var))
            throw InferenceError(
                "Hessian is singular or indefinite even after ridge fallback");
    }
    const double z = normal_quantile(0.5 + level / 2.0);
    const double factor = spec.family.bounded() ? double(spec.family.bound) : 1.0;
    band.mean = factor * param;
    band.variance = factor * factor * var;
    band.low = band.mean - z * std::sqrt(band.variance);
    band.high = band.mean + z * std::sqrt(band.variance);
    return band;
}

EffectCurve marginal_effect_curve(const FitResult& fit, const std::string& varying,
                                  const std::vector<double>& grid,
                                  const Eigen::VectorXd& context, double level) {
    const auto names = input_names(fit.spec);
    const auto it = std::find(names.begin(), names.end(), varying);
    if (it == names.end() || it == names.begin())
        throw std::invalid_argument("varying input must be a non-constant model input");
    const int slot = int(it - names.begin());

    EffectCurve curve;
    curve.varying_input = varying;
    curve.grid = grid;
    curve.fixed_context = context;
    curve.level = level;
    for (double v : grid) {
        Eigen::VectorXd raw = context;
        raw[slot] = v;
        const CiBand band = ci_band(fit, raw, level);
        curve.predicted_mean.push_back(band.mean);
        curve.ci_low.push_back(band.low);
        curve.ci_high.push_back(band.high);
        if (fit.spec.family.bounded())
            curve.success_prob.push_back(band.mean / double(fit.spec.family.bound));
        curve.ridged = curve.ridged || band.ridged;
    }
    return curve;
}

double zero_state_probability(const FitResult& fit, const Eigen::VectorXd& context) {
    Eigen::VectorXd raw = context;
    for (int i = 1; i <= fit.spec.p; ++i) raw[i] = 0.0;  // count lags forced to zero
    const double param = predict_param(fit, raw);
    const FamilySpec fam = effective_family(fit.spec, fit.params);
    return std::exp(log_pmf(fam, 0, param));
}

}  // namespace ningarch
