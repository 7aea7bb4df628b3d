#include "qexcess/dataset.hpp"

#include <cmath>
#include <fstream>

#include "qexcess/errors.hpp"

namespace qexcess {

namespace {

std::vector<std::string> element_columns(OutputMode mode) {
    std::vector<std::string> out;
    for (auto name : CovarianceMatrix::element_names()) {
        out.push_back(to_string(mode) + "_" + std::string(name));
    }
    return out;
}

const CovarianceMatrix& pick(const Snapshot& s, OutputMode mode) {
    switch (mode) {
    case OutputMode::quantum:
        return s.quantum;
    case OutputMode::classical:
        return s.classical;
    case OutputMode::excess:
        break;
    }
    return s.excess;
}

void append_normalized_columns(Table& t) {
    for (const char* name : {"normalized_x1x1", "normalized_x2x2", "normalized_x1x2"}) {
        t.columns.emplace_back(name);
    }
}

} // namespace

std::string render_dataset(const RunManifest& manifest, const Table& table) {
    std::string out = "# qexcess dataset\n# manifest-begin\n";
    const std::string body = serialize(manifest);
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto end = body.find('\n', pos);
        out += "# " + body.substr(pos, end - pos) + "\n";
        pos = end + 1;
    }
    out += "# manifest-end\n";
    const bool labelled = !table.label_column.empty();
    if (labelled) {
        out += table.label_column + (table.columns.empty() ? "" : ",");
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out += (c ? "," : "") + table.columns[c];
    }
    out += "\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (labelled) {
            out += table.labels.at(r) + (row.empty() ? "" : ",");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out += ",";
            }
            out += format_number(row[c]);
        }
        out += "\n";
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw Error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return path.string() + ".manifest.json";
}

Table simulate_table(const ScenarioResult& result, OutputMode mode, Normalization normalization,
                     double gamma1) {
    Table t;
    t.columns = {"t_seconds", "t_gamma_units"};
    for (auto& c : element_columns(mode)) {
        t.columns.push_back(c);
    }
    const bool normalized = mode == OutputMode::excess && normalization == Normalization::fdt;
    if (normalized) {
        append_normalized_columns(t);
    }
    const auto& series = result.series;
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
        const Snapshot& s = result.snapshots[k];
        std::vector<double> row{s.time, s.time * gamma1};
        for (double v : pick(s, mode).upper()) {
            row.push_back(v);
        }
        if (normalized) {
            row.push_back(series.normalized1(k));
            row.push_back(series.normalized2(k));
            row.push_back(series.normalized12(k));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table steady_table(const CovarianceMatrix& values, OutputMode mode, const ExcessSeries* normalizers) {
    Table t;
    t.columns = {"t_seconds", "t_gamma_units"};
    for (auto& c : element_columns(mode)) {
        t.columns.push_back(c);
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> row{inf, inf};
    for (double v : values.upper()) {
        row.push_back(v);
    }
    if (mode == OutputMode::excess && normalizers != nullptr) {
        append_normalized_columns(t);
        row.push_back(values(0, 0) / normalizers->normalizer1);
        row.push_back(values(2, 2) / normalizers->normalizer2);
        row.push_back(values(0, 2) / std::sqrt(normalizers->normalizer1 * normalizers->normalizer2));
    }
    t.rows.push_back(std::move(row));
    return t;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
    Table t;
    t.columns = {"temperature_K", "coupling_normalized", "excess_x1x2", "normalizer1", "normalizer2",
                 "normalized_x1x2"};
    for (const auto& r : rows) {
        t.rows.push_back({r.temperature, r.coupling, r.excess12, r.normalizer1, r.normalizer2, r.normalized12});
    }
    return t;
}

Table validation_table(const std::vector<CheckResult>& checks) {
    Table t;
    t.label_column = "check";
    t.columns = {"passed", "metric", "tolerance"};
    for (const auto& c : checks) {
        t.labels.push_back(c.name);
        t.rows.push_back({c.passed ? 1.0 : 0.0, c.metric, c.tolerance});
    }
    return t;
}

} // namespace qexcess
