// Command-line workflow for INGARCH count time-series modeling:
// order/hidden-size selection, maximum-likelihood fitting, diagnostics,
// and simulation. See README.md for usage examples.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ningarch/diagnostics.hpp"
#include "ningarch/io.hpp"
#include "ningarch/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ningarch;

namespace {

constexpr const char* kVersion = "ningarch 1.0.0";

constexpr int kExitIngest = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitInference = 4;
constexpr int kExitUsage = 5;

struct CommonOpts {
    std::string input;
    std::string count_col;
    int bound = 0;
    std::vector<std::string> covariates;
    int p = 1;
    int q = 0;
    int hidden = 0;
    std::string family = "poisson";
    std::string response = "degenerate";
    int restarts = 20;
    std::uint64_t seed = 1;
    double level = 0.9;
    std::string out = ".";
    bool no_scale_covariates = false;
};

void add_data_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--input", o.input, "delimited input file (csv or tsv)")->required();
    cmd->add_option("--count-col", o.count_col, "name of the count column (default: first)");
    cmd->add_option("--bound", o.bound, "upper bound n for binomial families");
    cmd->add_option("--covariates", o.covariates, "covariate column names")->delimiter(',');
}

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--p", o.p, "count lag order");
    cmd->add_option("--q", o.q, "conditional-mean lag order");
    cmd->add_option("--hidden", o.hidden, "hidden units H (neural response)");
    cmd->add_option("--family", o.family, "poisson|genpois|binomial|zib")
        ->check(CLI::IsMember({"poisson", "genpois", "binomial", "zib"}));
    cmd->add_option("--response", o.response, "neural|degenerate")
        ->check(CLI::IsMember({"neural", "degenerate"}));
    cmd->add_flag("--no-scale-covariates", o.no_scale_covariates,
                  "feed covariates raw instead of scaled to [0,1]");
}

void add_fit_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--restarts", o.restarts, "independent optimizer restarts");
    cmd->add_option("--seed", o.seed, "random seed");
}

Activation default_output(const FamilySpec& fam) {
    return fam.bounded() ? Activation::Logistic : Activation::Softplus;
}

ModelSpec build_spec(const CommonOpts& o, const CountSeries& series) {
    ModelSpec spec;
    spec.p = o.p;
    spec.q = o.q;
    spec.family.family = family_from_name(o.family);
    spec.family.bound = o.bound;
    if (spec.family.family == Family::GeneralizedPoisson) spec.family.alpha = 0.5;
    spec.response.output = default_output(spec.family);
    if (o.response == "neural") {
        if (o.hidden < 1)
            throw CLI::ValidationError("--hidden", "neural response needs --hidden >= 1");
        spec.response.hidden = o.hidden;
    }
    spec.covariate_columns = o.covariates;
    if (!o.no_scale_covariates && !o.covariates.empty())
        set_default_scaling(spec, series);
    spec.validate();
    return spec;
}

FitOptions build_fit_options(const CommonOpts& o) {
    FitOptions opt;
    opt.restarts = o.restarts;
    opt.seed = o.seed;
    return opt;
}

CountSeries load_series(const CommonOpts& o) {
    IngestOptions io;
    io.count_column = o.count_col;
    io.covariates = o.covariates;
    io.bound = o.bound;
    CountSeries series = ingest(o.input, io);
    const double zeros = double(std::count(series.y.begin(), series.y.end(), 0));
    std::cout << "ingested " << o.input << ": T=" << series.length()
              << " min=" << *std::min_element(series.y.begin(), series.y.end())
              << " max=" << *std::max_element(series.y.begin(), series.y.end())
              << " mean=" << series.mean()
              << " zero_fraction=" << zeros / series.length() << "\n";
    return series;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
    fs::create_directories(dir);
    json manifest;
    manifest["tool"] = kVersion;
    manifest["command"] = command;
    manifest["config"] = config;
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
}

json opts_to_json(const CommonOpts& o) {
    return {{"input", o.input},       {"count_col", o.count_col},
            {"bound", o.bound},       {"covariates", o.covariates},
            {"p", o.p},               {"q", o.q},
            {"hidden", o.hidden},     {"family", o.family},
            {"response", o.response}, {"restarts", o.restarts},
            {"seed", o.seed},         {"level", o.level},
            {"no_scale_covariates", o.no_scale_covariates}};
}

void print_table(const SelectionTable& table, bool with_hidden) {
    std::cout << (with_hidden ? "H" : "p,q")
              << "\tk\tT_eff\tloglik\taic\tbic\tstatus\n";
    for (const auto& r : table.rows) {
        if (with_hidden)
            std::cout << r.hidden;
        else
            std::cout << r.p << "," << r.q;
        if (!r.error.empty()) {
            std::cout << "\t-\t-\t-\t-\t-\tfailed: " << r.error << "\n";
            continue;
        }
        std::cout << "\t" << r.k_params << "\t" << r.effective_T << "\t" << r.loglik
                  << "\t" << r.aic << "\t" << r.bic << "\tok\n";
    }
}

void write_table_csv(const SelectionTable& table, bool with_hidden, const fs::path& path) {
    std::ofstream out(path);
    out.precision(17);
    out << (with_hidden ? "hidden" : "p,q") << ",k,effective_T,loglik,aic,bic,status\n";
    for (const auto& r : table.rows) {
        if (with_hidden)
            out << r.hidden;
        else
            out << r.p << "," << r.q;
        if (!r.error.empty()) {
            out << ",,,,,," << "failed\n";
            continue;
        }
        out << "," << r.k_params << "," << r.effective_T << "," << r.loglik << ","
            << r.aic << "," << r.bic << ",ok\n";
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return g;
}

int run_fit(const CommonOpts& o) {
    const CountSeries series = load_series(o);
    const ModelSpec spec = build_spec(o, series);
    const FitResult result = fit(series, spec, build_fit_options(o));
    const fs::path dir(o.out);
    write_manifest(dir, "fit", opts_to_json(o));
    save_fit(result, (dir / "fit.json").string());
    std::cout << "loglik=" << result.loglik << " aic=" << result.aic
              << " bic=" << result.bic << " k=" << result.k_params
              << " T_eff=" << result.effective_T << "\n"
              << "fit written to " << (dir / "fit.json").string() << "\n";
    return 0;
}

int run_select_order(const CommonOpts& o, const std::string& orders_arg) {
    const CountSeries series = load_series(o);
    CommonOpts base_opts = o;
    base_opts.response = "degenerate";
    const ModelSpec base = build_spec(base_opts, series);

    std::vector<std::pair<int, int>> candidates;
    std::stringstream ss(orders_arg);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("--orders", "expected 'p,q;p,q;...'");
        candidates.emplace_back(std::stoi(item.substr(0, comma)),
                                std::stoi(item.substr(comma + 1)));
    }
    const SelectionTable table = select_order(series, base, candidates, build_fit_options(o));
    const fs::path dir(o.out);
    json cfg = opts_to_json(o);
    cfg["orders"] = orders_arg;
    write_manifest(dir, "select-order", cfg);
    print_table(table, false);
    write_table_csv(table, false, dir / "order_selection.csv");
    return 0;
}

int run_select_hidden(const CommonOpts& o, int h_min, int h_max) {
    const CountSeries series = load_series(o);
    CommonOpts base_opts = o;
    base_opts.response = "neural";
    base_opts.hidden = std::max(1, h_min);
    const ModelSpec base = build_spec(base_opts, series);

    const int cap = int(0.1 * double(series.length() - base.p) / double(base.input_dim() + 1));
    if (h_max <= 0) h_max = std::max(cap, 1);
    std::vector<int> h_range;
    for (int h = std::max(1, h_min); h <= h_max; ++h) h_range.push_back(h);

    const SelectionTable table = select_hidden(series, base, h_range, build_fit_options(o));
    const fs::path dir(o.out);
    json cfg = opts_to_json(o);
    cfg["h_min"] = h_min;
    cfg["h_max"] = h_max;
    write_manifest(dir, "select-hidden", cfg);
    std::cout << "rule-of-thumb cap: H <= " << table.hidden_cap << "\n";
    print_table(table, true);
    write_table_csv(table, true, dir / "hidden_selection.csv");
    return 0;
}

int run_diagnose(const CommonOpts& o, const std::string& fit_path, int max_lag) {
    const CountSeries series = load_series(o);
    const FitResult result = load_fit(fit_path);
    const fs::path dir(o.out);
    json cfg = opts_to_json(o);
    cfg["fit"] = fit_path;
    cfg["max_lag"] = max_lag;
    write_manifest(dir, "diagnose", cfg);

    const auto residuals = pearson_residuals(series, result);
    const auto summary = residual_summary(residuals, max_lag, result.effective_T);
    std::ofstream res_out(dir / "residuals.csv");
    res_out.precision(17);
    res_out << "t,residual\n";
    for (int i = 0; i < int(residuals.size()); ++i)
        res_out << result.spec.p + i << "," << residuals[i] << "\n";

    std::ofstream sum_out(dir / "residual_summary.csv");
    sum_out.precision(17);
    sum_out << "mean,variance";
    for (int l = 1; l <= max_lag; ++l) sum_out << ",acf" << l;
    sum_out << ",critical_value\n" << summary.mean << "," << summary.variance;
    for (double a : summary.acf) sum_out << "," << a;
    sum_out << "," << summary.critical_value << "\n";

    std::cout << "pearson residuals: mean=" << summary.mean
              << " var=" << summary.variance << " acf1=" << summary.acf[0]
              << (summary.acf.size() > 1 ? " acf2=" + std::to_string(summary.acf[1]) : "")
              << " crit=" << summary.critical_value << "\n";

    // effect curve per non-constant input, all others at their sample means
    const Eigen::VectorXd context = mean_context(series, result);
    const auto names = input_names(result.spec);
    const FilterOutput flt = filter(result.spec, result.params, series);
    for (int slot = 1; slot < int(names.size()); ++slot) {
        double lo, hi;
        if (slot <= result.spec.p) {
            lo = 0.0;
            hi = double(*std::max_element(series.y.begin(), series.y.end()));
        } else if (slot <= result.spec.p + result.spec.q) {
            lo = flt.means.minCoeff();
            hi = flt.means.maxCoeff();
        } else {
            const int col = series.covariate_index(names[slot]);
            lo = series.covariates.col(col).minCoeff();
            hi = series.covariates.col(col).maxCoeff();
        }
        const EffectCurve curve =
            marginal_effect_curve(result, names[slot], linspace(lo, hi, 50), context, o.level);
        std::ofstream curve_out(dir / ("effect_" + names[slot] + ".csv"));
        curve_out.precision(17);
        curve_out << names[slot] << ",mean,low,high\n";
        for (int i = 0; i < int(curve.grid.size()); ++i)
            curve_out << curve.grid[i] << "," << curve.predicted_mean[i] << ","
                      << curve.ci_low[i] << "," << curve.ci_high[i] << "\n";
        if (curve.ridged)
            std::cout << "note: ridge fallback used for effect_" << names[slot] << "\n";
    }

    const double p00 = zero_state_probability(result, context);
    std::cout << "zero state probability (count lags = 0): " << p00 << "\n";
    std::ofstream zs(dir / "zero_state.csv");
    zs.precision(17);
    zs << "zero_state_probability\n" << p00 << "\n";
    return 0;
}

int run_simulate(const CommonOpts& o, const std::string& fit_path,
                 const std::vector<double>& params, int length, int burn_in,
                 const std::string& out_file) {
    SimConfig config;
    if (!fit_path.empty()) {
        const FitResult result = load_fit(fit_path);
        config.spec = result.spec;
        config.params = result.params;
    } else {
        if (params.empty())
            throw CLI::ValidationError("--params", "provide --fit or --params");
        CountSeries dummy;  // spec construction without data: raw scaling only
        dummy.y = {0};
        CommonOpts spec_opts = o;
        spec_opts.no_scale_covariates = true;
        config.spec = build_spec(spec_opts, dummy);
        config.params = Eigen::Map<const Eigen::VectorXd>(params.data(), long(params.size()));
    }
    if (!config.spec.covariate_columns.empty())
        throw CLI::ValidationError("--covariates",
                                   "simulate does not generate covariates; "
                                   "use a spec without them");
    config.length = length;
    config.burn_in = burn_in;
    config.seed = o.seed;
    const CountSeries series = simulate(config);
    const fs::path out_path(out_file);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    write_series(series, out_file);
    json cfg = opts_to_json(o);
    cfg["fit"] = fit_path;
    cfg["length"] = length;
    cfg["burn_in"] = burn_in;
    cfg["series_out"] = out_file;
    write_manifest(fs::path(o.out), "simulate", cfg);
    std::cout << "wrote " << series.length() << " observations to " << out_file << "\n";
    return 0;
}

int run_report(const std::string& fit_path) {
    const FitResult result = load_fit(fit_path);
    const auto names = input_names(result.spec);
    std::cout << "model: " << (result.spec.response.neural() ? "neural" : "degenerate")
              << " " << family_name(result.spec.family.family) << " INGARCH("
              << result.spec.p << "," << result.spec.q << ")";
    if (result.spec.response.neural()) std::cout << " H=" << result.spec.response.hidden;
    if (result.spec.family.bounded()) std::cout << " n=" << result.spec.family.bound;
    std::cout << "\nresponse: " << activation_name(result.spec.response.output)
              << "  inputs:";
    for (const auto& n : names) std::cout << " " << n;
    std::cout << "\nloglik=" << result.loglik << " aic=" << result.aic
              << " bic=" << result.bic << " k=" << result.k_params
              << " T_eff=" << result.effective_T << "\n";
    if (result.spec.family.family == Family::GeneralizedPoisson)
        std::cout << "alpha=" << result.params[result.spec.response_params()] << "\n";
    if (result.spec.family.family == Family::ZeroInflatedBinomial)
        std::cout << "omega=" << result.params[result.spec.response_params()] << "\n";
    std::cout << "parameters:";
    for (int i = 0; i < result.params.size(); ++i) std::cout << " " << result.params[i];
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural and conventional INGARCH models for count time series"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::cout.precision(10);

    CommonOpts o;
    std::string orders = "1,0;2,0;1,1";
    int h_min = 1, h_max = 0, max_lag = 10, length = 1000, burn_in = 500;
    std::string fit_path, out_file = "simulated.csv";
    std::vector<double> params;

    auto* cmd_fit = app.add_subcommand("fit", "maximum-likelihood fit");
    add_data_flags(cmd_fit, o);
    add_model_flags(cmd_fit, o);
    add_fit_flags(cmd_fit, o);
    cmd_fit->add_option("--out", o.out, "output directory");

    auto* cmd_order = app.add_subcommand("select-order", "rank (p,q) for the degenerate model");
    add_data_flags(cmd_order, o);
    add_model_flags(cmd_order, o);
    add_fit_flags(cmd_order, o);
    cmd_order->add_option("--orders", orders, "candidates as 'p,q;p,q;...'");
    cmd_order->add_option("--out", o.out, "output directory");

    auto* cmd_hidden = app.add_subcommand("select-hidden", "rank hidden sizes H");
    add_data_flags(cmd_hidden, o);
    add_model_flags(cmd_hidden, o);
    add_fit_flags(cmd_hidden, o);
    cmd_hidden->add_option("--h-min", h_min, "smallest H");
    cmd_hidden->add_option("--h-max", h_max, "largest H (default: rule-of-thumb cap)");
    cmd_hidden->add_option("--out", o.out, "output directory");

    auto* cmd_diag = app.add_subcommand("diagnose", "residuals, effect curves, CI bands");
    add_data_flags(cmd_diag, o);
    cmd_diag->add_option("--fit", fit_path, "persisted fit file")->required();
    cmd_diag->add_option("--level", o.level, "pointwise confidence level");
    cmd_diag->add_option("--max-lag", max_lag, "ACF lags reported");
    cmd_diag->add_option("--out", o.out, "output directory");

    auto* cmd_sim = app.add_subcommand("simulate", "generate a synthetic series");
    add_model_flags(cmd_sim, o);
    cmd_sim->add_option("--fit", fit_path, "generate from a persisted fit");
    cmd_sim->add_option("--params", params, "flat parameter vector")->delimiter(',');
    cmd_sim->add_option("--bound", o.bound, "upper bound n for binomial families");
    cmd_sim->add_option("--length", length, "sample length");
    cmd_sim->add_option("--burn-in", burn_in, "discarded warmup steps");
    cmd_sim->add_option("--seed", o.seed, "random seed");
    cmd_sim->add_option("--series-out", out_file, "output series file");
    cmd_sim->add_option("--out", o.out, "manifest directory");

    auto* cmd_report = app.add_subcommand("report", "text summary of a persisted fit");
    cmd_report->add_option("--fit", fit_path, "persisted fit file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (cmd_fit->parsed()) return run_fit(o);
        if (cmd_order->parsed()) return run_select_order(o, orders);
        if (cmd_hidden->parsed()) return run_select_hidden(o, h_min, h_max);
        if (cmd_diag->parsed()) return run_diagnose(o, fit_path, max_lag);
        if (cmd_sim->parsed())
            return run_simulate(o, fit_path, params, length, burn_in, out_file);
        if (cmd_report->parsed()) return run_report(fit_path);
    } catch (const IngestError& e) {
        std::cerr << "ingestion error: " << e.what() << "\n";
        return kExitIngest;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        for (const auto& r : e.restart_log)
            std::cerr << "  restart " << r.index << " seed=" << r.seed
                      << " status=" << r.status << "\n";
        return kExitConvergence;
    } catch (const InferenceError& e) {
        std::cerr << "inference error: " << e.what() << "\n";
        return kExitInference;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
