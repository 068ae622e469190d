#include "ningarch/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ningarch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AuxTransform {
    // alpha = exp(a) for GP, omega = logistic(b) for ZIB
    static double to_constrained(Family family, double u) {
        return family == Family::GeneralizedPoisson ? std::exp(u) : logistic(u);
    }
    static double to_unconstrained(Family family, double v) {
        return family == Family::GeneralizedPoisson ? std::log(v)
                                                    : std::log(v / (1.0 - v));
    }
    static double jacobian(Family family, double v) {
        return family == Family::GeneralizedPoisson ? v : v * (1.0 - v);
    }
};

Eigen::VectorXd to_constrained(const ModelSpec& spec, const Eigen::VectorXd& u) {
    Eigen::VectorXd p = u;
    if (spec.family.has_aux()) {
        const int i = spec.response_params();
        p[i] = AuxTransform::to_constrained(spec.family.family, u[i]);
    }
    return p;
}

/// Negative log-likelihood and gradient in the unconstrained parameterization.
/// Infeasible points (transient domain violations) evaluate to +inf.
class Objective {
  public:
    Objective(const CountSeries& series, const ModelSpec& spec)
        : series_(series), spec_(spec) {}

    double value(const Eigen::VectorXd& u) const {
        try {
            return -loglik(spec_, to_constrained(spec_, u), series_);
        } catch (const FilterError&) {
            return kInf;
        } catch (const std::domain_error&) {
            return kInf;
        }
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& u) const {
        const Eigen::VectorXd p = to_constrained(spec_, u);
        Eigen::VectorXd g = -loglik_grad(spec_, p, series_);
        if (spec_.family.has_aux()) {
            const int i = spec_.response_params();
            g[i] *= AuxTransform::jacobian(spec_.family.family, p[i]);
        }
        return g;
    }

  private:
    const CountSeries& series_;
    const ModelSpec& spec_;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = kInf;
    bool converged = false;
    int iterations = 0;
    std::string status;
};

BfgsResult bfgs_minimize(const Objective& obj, Eigen::VectorXd x, const FitOptions& opt) {
    const int n = int(x.size());
    BfgsResult res;
    double f = obj.value(x);
    if (!std::isfinite(f)) {
        res.x = x;
        res.status = "initial point infeasible";
        return res;
    }
    Eigen::VectorXd g = obj.gradient(x);
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    int stall = 0;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        res.iterations = iter;
        if (g.lpNorm<Eigen::Infinity>() < opt.grad_tolerance) {
            res.converged = true;
            res.status = "gradient tolerance";
            break;
        }
        Eigen::VectorXd d = -(Hinv * g);
        double slope = d.dot(g);
        if (!(slope < 0.0)) {  // not a descent direction: reset curvature
            Hinv.setIdentity();
            d = -g;
            slope = d.dot(g);
        }
        // backtracking Armijo line search
        double step = 1.0;
        double fnew = kInf;
        Eigen::VectorXd xnew;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xnew = x + step * d;
            fnew = obj.value(xnew);
            if (std::isfinite(fnew) && fnew <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.converged = true;  // no further progress possible at this scale
            res.status = "line search exhausted";
            break;
        }
        const Eigen::VectorXd gnew = obj.gradient(xnew);
        const Eigen::VectorXd s = xnew - x;
        const Eigen::VectorXd ygap = gnew - g;
        const double sy = s.dot(ygap);
        if (sy > 1e-10 * s.norm() * ygap.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd A =
                Eigen::MatrixXd::Identity(n, n) - rho * s * ygap.transpose();
            Hinv = A * Hinv * A.transpose() + rho * s * s.transpose();
        }
        const double rel = std::fabs(f - fnew) / (1.0 + std::fabs(f));
        stall = rel < opt.step_tolerance ? stall + 1 : 0;
        x = xnew;
        f = fnew;
        g = gnew;
        if (stall >= 5) {
            res.converged = true;
            res.status = "relative improvement tolerance";
            break;
        }
    }
    if (res.status.empty()) res.status = "max iterations";
    res.x = x;
    res.value = f;
    return res;
}

Eigen::VectorXd random_start(const ModelSpec& spec, std::mt19937_64& rng, double scale) {
    const int nw = spec.response_params();
    const double s = scale / std::sqrt(double(spec.input_dim()));
    Eigen::VectorXd u(spec.total_params());
    for (int i = 0; i < nw; ++i) u[i] = s * (2.0 * uniform01(rng) - 1.0);
    if (spec.family.has_aux()) {
        const double center = spec.family.family == Family::GeneralizedPoisson
                                  ? std::log(0.5)             // alpha around 0.5
                                  : std::log(0.2 / 0.8);      // omega around 0.2
        u[nw] = center + (uniform01(rng) - 0.5);
    }
    return u;
}

}  // namespace

std::pair<double, double> information_criteria(double loglik, int k, int t_eff) {
    return {-2.0 * loglik + 2.0 * k, -2.0 * loglik + k * std::log(double(t_eff))};
}

FitResult fit(const CountSeries& series, const ModelSpec& spec, const FitOptions& options) {
    spec.validate();
    series.validate();
    if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (spec.family.family == Family::GeneralizedPoisson &&
        *std::max_element(series.y.begin(), series.y.end()) == 0)
        throw std::domain_error(
            "series is constant zero: generalized Poisson dispersion is unidentified");

    const Objective obj(series, spec);
    std::vector<RestartRecord> log;
    BfgsResult best;
    int best_index = -1;

    for (int r = 0; r < options.restarts; ++r) {
        const std::uint64_t restart_seed =
            options.seed + 0x9E3779B97F4A7C15ull * std::uint64_t(r + 1);
        std::mt19937_64 rng(restart_seed);
        const Eigen::VectorXd start = random_start(spec, rng, options.init_scale);
        BfgsResult res = bfgs_minimize(obj, start, options);
        log.push_back({r, restart_seed, -res.value, res.converged, res.iterations,
                       res.status});
        if (res.converged && (best_index < 0 || res.value < best.value)) {
            best = std::move(res);
            best_index = r;
        }
    }
    if (best_index < 0)
        throw ConvergenceError("no restart converged", std::move(log));

    FitResult out;
    out.spec = spec;
    out.params = to_constrained(spec, best.x);
    out.loglik = -best.value;
    out.k_params = spec.total_params();
    out.effective_T = series.length() - spec.p;
    std::tie(out.aic, out.bic) =
        information_criteria(out.loglik, out.k_params, out.effective_T);
    out.hessian = numerical_hessian(series, spec, out.params);
    out.converged = true;
    out.restart_log = std::move(log);
    return out;
}

Eigen::MatrixXd numerical_hessian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const Eigen::VectorXd& point) {
    const int n = int(point.size());
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
        const double h = root_eps * (1.0 + std::fabs(point[i]));
        Eigen::VectorXd up = point, dn = point;
        up[i] += h;
        dn[i] -= h;
        H.col(i) = (gradient(up) - gradient(dn)) / (2.0 * h);
    }
    if (!H.allFinite())
        throw std::runtime_error("numerical Hessian contains non-finite entries");
    return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd numerical_hessian(const CountSeries& series, const ModelSpec& spec,
                                  const Eigen::VectorXd& params) {
    return numerical_hessian(
        [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
            return -loglik_grad(spec, p, series);
        },
        params);
}

CountSeries trim_head(const CountSeries& series, int head) {
    if (head < 0 || head >= series.length())
        throw std::invalid_argument("invalid head trim");
    CountSeries out = series;
    out.y.assign(series.y.begin() + head, series.y.end());
    if (series.covariates.size() > 0)
        out.covariates = series.covariates.bottomRows(series.length() - head).eval();
    return out;
}

namespace {

void sort_rows(SelectionTable& table) {
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const CandidateRow& a, const CandidateRow& b) {
                         if (a.error.empty() != b.error.empty()) return a.error.empty();
                         return a.aic < b.aic;
                     });
}

}  // namespace

SelectionTable select_order(const CountSeries& series, const ModelSpec& base,
                            const std::vector<std::pair<int, int>>& candidates,
                            const FitOptions& options) {
    if (candidates.empty()) throw std::invalid_argument("no candidate orders");
    int max_p = 0;
    for (const auto& [p, q] : candidates) max_p = std::max(max_p, p);

    SelectionTable table;
    for (const auto& [p, q] : candidates) {
        ModelSpec spec = base;
        spec.p = p;
        spec.q = q;
        spec.response.hidden = 0;
        const CountSeries aligned = trim_head(series, max_p - p);
        if (!base.scaling.empty() || !spec.covariate_columns.empty())
            set_default_scaling(spec, aligned);
        CandidateRow row;
        row.p = p;
        row.q = q;
        try {
            const FitResult f = fit(aligned, spec, options);
            row.loglik = f.loglik;
            row.aic = f.aic;
            row.bic = f.bic;
            row.k_params = f.k_params;
            row.effective_T = f.effective_T;
            row.converged = f.converged;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.rows.push_back(row);
    }
    if (std::all_of(table.rows.begin(), table.rows.end(),
                    [](const CandidateRow& r) { return !r.error.empty(); }))
        throw std::runtime_error("every candidate order failed to fit");
    sort_rows(table);
    return table;
}

SelectionTable select_hidden(const CountSeries& series, const ModelSpec& base,
                             const std::vector<int>& h_range, const FitOptions& options) {
    if (h_range.empty()) throw std::invalid_argument("no candidate hidden sizes");
    SelectionTable table;
    const int t_eff = series.length() - base.p;
    table.hidden_cap = int(0.1 * double(t_eff) / double(base.input_dim() + 1));
    for (int h : h_range) {
        ModelSpec spec = base;
        spec.response.hidden = h;
        CandidateRow row;
        row.p = spec.p;
        row.q = spec.q;
        row.hidden = h;
        try {
            const FitResult f = fit(series, spec, options);
            row.loglik = f.loglik;
            row.aic = f.aic;
            row.bic = f.bic;
            row.k_params = f.k_params;
            row.effective_T = f.effective_T;
            row.converged = f.converged;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.rows.push_back(row);
    }
    if (std::all_of(table.rows.begin(), table.rows.end(),
                    [](const CandidateRow& r) { return !r.error.empty(); }))
        throw std::runtime_error("every candidate hidden size failed to fit");
    sort_rows(table);
    return table;
}

}  // namespace ningarch
