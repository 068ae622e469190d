#pragma once

#include <string>
#include <vector>

#include "ningarch/estimation.hpp"

namespace ningarch {

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IngestOptions {
    std::string count_column;            ///< empty: first column
    std::vector<std::string> covariates; ///< columns kept as covariates
    int bound = 0;                       ///< 0 means unbounded
};

/// Reads a delimited text file (comma or tab, header row) into a CountSeries.
/// Reports malformed rows, non-integer or negative counts, and bound
/// violations with their line numbers.
CountSeries ingest(const std::string& path, const IngestOptions& options);

/// Writes a series in the same format ingest reads (count column "y").
void write_series(const CountSeries& series, const std::string& path);

/// Fit persistence: a self-describing JSON document with the full-precision
/// parameter vector, layout, scaling constants, criteria, and Hessian.
std::string fit_to_json(const FitResult& fit);
FitResult fit_from_json(const std::string& text);
void save_fit(const FitResult& fit, const std::string& path);
FitResult load_fit(const std::string& path);

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);
std::string family_name(Family f);
Family family_from_name(const std::string& name);

}  // namespace ningarch
