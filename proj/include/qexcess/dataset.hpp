// dataset.hpp: CSV datasets with an embedded manifest, written atomically
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qexcess/manifest.hpp"
#include "qexcess/validation.hpp"

namespace qexcess {

struct Table {
    /// Optional leading text column.
    std::string label_column;
    std::vector<std::string> labels;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Commented header (the serialized manifest between `# manifest-begin` and
/// `# manifest-end`), a column line, then rows at 17 significant digits.
std::string render_dataset(const RunManifest& manifest, const Table& table);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Path of the JSON sidecar: `<path>.manifest.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// t_seconds, t_gamma_units, <mode>_<element> for the 10 independent
/// elements, plus normalized_x1x1, normalized_x2x2, normalized_x1x2 when the
/// mode is excess and FDT normalization is on.
Table simulate_table(const ScenarioResult& result, OutputMode mode, Normalization normalization,
                     double gamma1);

/// The same columns with a single row at t = inf.
Table steady_table(const CovarianceMatrix& values, OutputMode mode, const ExcessSeries* normalizers);

/// temperature_K, coupling_normalized, excess_x1x2, normalizer1, normalizer2, normalized_x1x2.
Table sweep_table(const std::vector<SweepRow>& rows);

/// check, passed, metric, tolerance.
Table validation_table(const std::vector<CheckResult>& checks);

} // namespace qexcess
