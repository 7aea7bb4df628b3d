// manifest.hpp: run configuration: parsing, resolution and canonical serialization
//
// Config files are `key = value` lines; `#` starts a comment. Every key is
// optional and missing ones take the standard system (M1 = 1e-23 g,
// w01 = 1e13 rad/s, M2 = 1.1 M1, w02 = 1.1 w01, gamma = 0.01 w01,
// normalized coupling 0.01, T = 300 K). See README.md for the key list.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "qexcess/experiments.hpp"

namespace qexcess {

enum class Command { simulate, steady, sweep, validate };
enum class OutputMode { quantum, classical, excess };

std::string to_string(Command c);
std::string to_string(OutputMode m);
Command parse_command(std::string_view text);
OutputMode parse_output_mode(std::string_view text);

struct RunManifest {
    Command command = Command::simulate;
    std::string name = "run";
    SystemConfig config = SystemConfig::reference_system();
    double hbar_scale = 1.0;
    InitialPolicy initial_policy = InitialPolicy::ground_state;
    std::optional<CovarianceMatrix> initial;
    TimeGrid grid = TimeGrid::standard(SystemConfig::reference_system());
    OutputMode mode = OutputMode::excess;
    Normalization normalization = Normalization::fdt;
    double omega_max_factor = 50.0;
    ClassicalInitial classical_initial = ClassicalInitial::zero;
    FdtReference fdt_reference = FdtReference::isolated;
    NoiseRoute route = NoiseRoute::automatic;
    SweepSpec sweep = SweepSpec::standard();
    /// Declared thresholds (`check.<name> = value`), carried verbatim.
    std::map<std::string, double> checks;
    /// Normalized inputs as written by the user (`input.<key>`), for the record.
    std::map<std::string, std::string> inputs;
    std::string engine_version = QEXCESS_VERSION;

    PhysicalConstants constants() const;
    EngineOptions engine_options(unsigned threads = 1) const;
    Scenario scenario() const;

    bool operator==(const RunManifest&) const = default;
};

/// Parses config text. `source` names the input in diagnostics. Throws
/// ParseError (with line) for syntax, unknown or duplicate keys and bad
/// values; ConfigError when the resolved system violates an invariant.
RunManifest parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads a config file, a dataset CSV (embedded header) or a JSON sidecar.
RunManifest load_manifest(const std::string& path);

/// Canonical key = value text; parse_config(serialize(m)) == m.
std::string serialize(const RunManifest& manifest);

/// Same content as a JSON object of key -> value strings, in canonical order.
std::string manifest_json(const RunManifest& manifest, const std::string& output_path,
                          std::size_t rows);

/// "%.17g"; non-finite values as inf, -inf, nan.
std::string format_number(double value);

} // namespace qexcess
