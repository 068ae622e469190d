#include "ningarch/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ningarch {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) out.push_back(field);
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Logistic: return "logistic";
        case Activation::Softplus: return "softplus";
        case Activation::Identity: return "identity";
    }
    throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "logistic") return Activation::Logistic;
    if (name == "softplus") return Activation::Softplus;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Poisson: return "poisson";
        case Family::GeneralizedPoisson: return "genpois";
        case Family::Binomial: return "binomial";
        case Family::ZeroInflatedBinomial: return "zib";
    }
    throw std::logic_error("unknown family");
}

Family family_from_name(const std::string& name) {
    if (name == "poisson") return Family::Poisson;
    if (name == "genpois") return Family::GeneralizedPoisson;
    if (name == "binomial") return Family::Binomial;
    if (name == "zib") return Family::ZeroInflatedBinomial;
    throw std::invalid_argument("unknown family: " + name);
}

CountSeries ingest(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw IngestError(path + ": empty file");
    const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
    std::vector<std::string> cols;
    for (auto& c : split(header, delim)) cols.push_back(strip(c));

    auto column_index = [&](const std::string& name) -> int {
        for (int i = 0; i < int(cols.size()); ++i)
            if (cols[i] == name) return i;
        throw IngestError(path + ": no column named '" + name + "'");
    };

    const int count_col =
        options.count_column.empty() ? 0 : column_index(options.count_column);
    std::vector<int> cov_cols;
    for (const auto& name : options.covariates) cov_cols.push_back(column_index(name));

    std::vector<int> y;
    std::vector<std::vector<double>> cov_rows;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split(line, delim);
        if (fields.size() != cols.size())
            throw IngestError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(cols.size()) + " fields, got " +
                              std::to_string(fields.size()));
        auto parse_double = [&](int col) -> double {
            try {
                size_t pos = 0;
                const std::string f = strip(fields[col]);
                const double v = std::stod(f, &pos);
                if (pos != f.size()) throw std::invalid_argument("trailing characters");
                return v;
            } catch (const std::exception&) {
                throw IngestError(path + ":" + std::to_string(line_no) +
                                  ": cannot parse '" + strip(fields[col]) +
                                  "' in column " + cols[col]);
            }
        };
        const double raw = parse_double(count_col);
        const int count = int(std::lround(raw));
        if (raw != double(count))
            throw IngestError(path + ":" + std::to_string(line_no) +
                              ": non-integer count " + strip(fields[count_col]));
        if (count < 0)
            throw IngestError(path + ":" + std::to_string(line_no) + ": negative count");
        if (options.bound > 0 && count > options.bound)
            throw IngestError(path + ":" + std::to_string(line_no) +
                              ": count exceeds declared bound " +
                              std::to_string(options.bound));
        y.push_back(count);
        std::vector<double> row;
        for (int c : cov_cols) row.push_back(parse_double(c));
        cov_rows.push_back(std::move(row));
    }
    if (y.empty()) throw IngestError(path + ": no data rows");

    CountSeries series;
    series.y = std::move(y);
    if (options.bound > 0) series.bound = options.bound;
    series.covariate_names = options.covariates;
    series.covariates.resize(series.length(), int(cov_cols.size()));
    for (int t = 0; t < series.length(); ++t)
        for (int c = 0; c < int(cov_cols.size()); ++c)
            series.covariates(t, c) = cov_rows[t][c];
    series.origin = path;
    series.validate();
    return series;
}

void write_series(const CountSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path);
    out << "y";
    for (const auto& name : series.covariate_names) out << "," << name;
    out << "\n";
    out.precision(17);
    for (int t = 0; t < series.length(); ++t) {
        out << series.y[t];
        for (int c = 0; c < series.covariates.cols(); ++c)
            out << "," << series.covariates(t, c);
        out << "\n";
    }
}

namespace {

json spec_to_json(const ModelSpec& spec) {
    json scaling = json::array();
    for (const auto& s : spec.scaling) scaling.push_back({s.offset, s.factor});
    return {{"p", spec.p},
            {"q", spec.q},
            {"hidden", spec.response.hidden},
            {"output_activation", activation_name(spec.response.output)},
            {"family", family_name(spec.family.family)},
            {"bound", spec.family.bound},
            {"covariates", spec.covariate_columns},
            {"scaling", scaling}};
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec spec;
    spec.p = j.at("p");
    spec.q = j.at("q");
    spec.response.hidden = j.at("hidden");
    spec.response.output = activation_from_name(j.at("output_activation"));
    spec.family.family = family_from_name(j.at("family"));
    spec.family.bound = j.at("bound");
    spec.covariate_columns = j.at("covariates").get<std::vector<std::string>>();
    for (const auto& s : j.at("scaling"))
        spec.scaling.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
    return spec;
}

}  // namespace

std::string fit_to_json(const FitResult& fit) {
    json j;
    j["format"] = "ningarch-fit-v1";
    j["spec"] = spec_to_json(fit.spec);
    j["input_names"] = input_names(fit.spec);
    j["params"] = std::vector<double>(fit.params.data(), fit.params.data() + fit.params.size());
    j["loglik"] = fit.loglik;
    j["aic"] = fit.aic;
    j["bic"] = fit.bic;
    j["k_params"] = fit.k_params;
    j["effective_T"] = fit.effective_T;
    j["converged"] = fit.converged;
    json hess = json::array();
    for (int r = 0; r < fit.hessian.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < fit.hessian.cols(); ++c) row.push_back(fit.hessian(r, c));
        hess.push_back(row);
    }
    j["hessian"] = hess;
    json restarts = json::array();
    for (const auto& r : fit.restart_log)
        restarts.push_back({{"index", r.index},
                            {"seed", r.seed},
                            {"loglik", r.loglik},
                            {"converged", r.converged},
                            {"iterations", r.iterations},
                            {"status", r.status}});
    j["restart_log"] = restarts;
    return j.dump(2) + "\n";
}

FitResult fit_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.at("format") != "ningarch-fit-v1")
        throw std::invalid_argument("unrecognized fit file format");
    FitResult fit;
    fit.spec = spec_from_json(j.at("spec"));
    const auto params = j.at("params").get<std::vector<double>>();
    fit.params = Eigen::Map<const Eigen::VectorXd>(params.data(), long(params.size()));
    fit.loglik = j.at("loglik");
    fit.aic = j.at("aic");
    fit.bic = j.at("bic");
    fit.k_params = j.at("k_params");
    fit.effective_T = j.at("effective_T");
    fit.converged = j.at("converged");
    const auto& hess = j.at("hessian");
    fit.hessian.resize(long(hess.size()), long(hess.size()));
    for (int r = 0; r < int(hess.size()); ++r)
        for (int c = 0; c < int(hess[r].size()); ++c)
            fit.hessian(r, c) = hess[r][c];
    for (const auto& r : j.at("restart_log"))
        fit.restart_log.push_back({r.at("index"), r.at("seed"), r.at("loglik"),
                                   r.at("converged"), r.at("iterations"),
                                   r.at("status")});
    return fit;
}

void save_fit(const FitResult& fit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << fit_to_json(fit);
}

FitResult load_fit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return fit_from_json(ss.str());
}

}  // namespace ningarch
