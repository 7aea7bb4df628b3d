// qexcess: command-line front end for the coupled-oscillator covariance engine
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qexcess/dataset.hpp"
#include "qexcess/errors.hpp"
#include "qexcess/manifest.hpp"
#include "qexcess/validation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Options {
    std::string config;
    std::string out;
    std::optional<unsigned> threads;
    std::optional<std::string> mode;
};

unsigned resolve_threads(const Options& o) {
    if (o.threads) {
        if (*o.threads == 0) {
            throw qexcess::ConfigError("--threads must be at least 1");
        }
        return *o.threads;
    }
    const char* env = std::getenv("QEXCESS_THREADS");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    unsigned value = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
        throw qexcess::ConfigError("QEXCESS_THREADS must be a positive integer, got '" + text + "'");
    }
    return value;
}

void emit(const qexcess::RunManifest& m, const qexcess::Table& table, const std::string& out) {
    qexcess::write_atomic(out, qexcess::render_dataset(m, table));
    qexcess::write_atomic(qexcess::sidecar_path(out), qexcess::manifest_json(m, out, table.rows.size()));
    std::cout << "wrote " << out << " (" << table.rows.size() << " rows)\n";
}

int run(qexcess::Command command, const Options& o) {
    using namespace qexcess;
    RunManifest m = load_manifest(o.config);
    m.command = command;
    m.engine_version = QEXCESS_VERSION;
    if (o.mode) {
        m.mode = parse_output_mode(*o.mode);
    }
    const unsigned threads = resolve_threads(o);
    const EngineOptions engine = m.engine_options(threads);

    switch (command) {
    case Command::simulate: {
        const ScenarioResult result = run_scenario(m.scenario(), engine);
        emit(m, simulate_table(result, m.mode, m.normalization, m.config.osc1().damping), o.out);
        return kOk;
    }
    case Command::steady: {
        const CovarianceEngine e(m.config, engine);
        CovarianceMatrix values;
        switch (m.mode) {
        case OutputMode::quantum:
            values = e.steady_state_covariance(Mode::quantum);
            break;
        case OutputMode::classical:
            values = e.steady_state_covariance(Mode::classical);
            break;
        case OutputMode::excess:
            values = e.steady_state_excess();
            break;
        }
        std::optional<ExcessSeries> norms;
        if (m.mode == OutputMode::excess && m.normalization == Normalization::fdt) {
            norms.emplace();
            norms->normalizer1 = e.fdt_variance(0, m.config.bath(0).temperature);
            norms->normalizer2 = e.fdt_variance(1, m.config.bath(1).temperature);
        }
        emit(m, steady_table(values, m.mode, norms ? &*norms : nullptr), o.out);
        return kOk;
    }
    case Command::sweep: {
        ExperimentOptions x;
        x.base = m.config;
        x.engine = engine;
        emit(m, sweep_table(run_fig4_sweep(m.sweep, x)), o.out);
        return kOk;
    }
    case Command::validate: {
        const auto checks = run_validation_suite(m.config, engine);
        bool ok = true;
        for (const auto& c : checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  metric=" << format_number(c.metric)
                      << "  tolerance=" << format_number(c.tolerance);
            if (!c.detail.empty()) {
                std::cout << "  (" << c.detail << ")";
            }
            std::cout << "\n";
            ok = ok && c.passed;
        }
        emit(m, validation_table(checks), o.out);
        return ok ? kOk : kFailed;
    }
    }
    return kUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariance dynamics of two coupled damped quantum oscillators"};
    app.set_version_flag("--version", std::string(QEXCESS_VERSION));
    app.require_subcommand(1);

    Options options;
    std::optional<qexcess::Command> chosen;
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "transient covariance on the configured time grid"},
        {"steady", "stationary covariance"},
        {"sweep", "stationary normalized cross excess over couplings and temperatures"},
        {"validate", "cross-check the engine against its oracle paths"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", options.config, "config file, dataset CSV or manifest JSON")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", options.out, "output CSV path")->required();
        sub->add_option("--threads", options.threads, "worker threads (default: QEXCESS_THREADS or 1)");
        sub->add_option("--mode", options.mode, "quantum, classical or excess")
            ->check(CLI::IsMember({"quantum", "classical", "excess"}));
        sub->callback([&chosen, n = std::string(name)] { chosen = qexcess::parse_command(n); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        return run(*chosen, options);
    } catch (const qexcess::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const qexcess::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const qexcess::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
}
