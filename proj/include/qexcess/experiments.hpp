// experiments.hpp: scenario and sweep runners behind the four figure-style datasets
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qexcess/dynamics.hpp"

namespace qexcess {

enum class GridSpacing { linear, log };

/// Sample times in seconds. Log spacing needs start > 0.
struct TimeGrid {
    double start = 0.0;
    double stop = 0.0;
    int count = 400;
    GridSpacing spacing = GridSpacing::linear;

    /// [0, 30/gamma1] with 400 linear points.
    static TimeGrid standard(const SystemConfig& config, double span_gamma = 30.0, int count = 400);

    void validate() const;
    std::vector<double> points() const;
    bool operator==(const TimeGrid&) const = default;
};

enum class InitialPolicy { ground_state, explicit_matrix };
enum class Normalization { fdt, none };

struct ModeSet {
    bool quantum = false;
    bool classical = false;
    bool excess = true;
    bool operator==(const ModeSet&) const = default;
};

struct Scenario {
    std::string name = "scenario";
    SystemConfig config = SystemConfig::reference_system();
    InitialPolicy initial_policy = InitialPolicy::ground_state;
    std::optional<CovarianceMatrix> initial;
    TimeGrid grid = TimeGrid::standard(SystemConfig::reference_system());
    ModeSet modes{};
    Normalization normalization = Normalization::fdt;

    CovarianceMatrix initial_state(const PhysicalConstants& constants = {}) const;
    void validate() const;
};

struct SweepSpec {
    std::vector<double> couplings;     // normalized, each in (0, 1)
    std::vector<double> temperatures;  // K, T1 = T2 = T for each entry

    /// 16 log-spaced couplings in [0.005, 0.3] at 5, 50 and 100 K.
    static SweepSpec standard();
    void validate() const;
    bool operator==(const SweepSpec&) const = default;
};

struct SweepRow {
    double temperature;
    double coupling;      // normalized
    double excess12;      // cm^2, stationary Delta^q_12
    double normalizer1;   // cm^2
    double normalizer2;   // cm^2
    double normalized12;  // excess12 / sqrt(normalizer1 normalizer2)
};

/// Shared knobs for the figure runners: the base system (temperatures and
/// coupling are overridden per call), engine options and an optional grid
/// (default TimeGrid::standard of the resolved system).
struct ExperimentOptions {
    SystemConfig base = SystemConfig::reference_system();
    EngineOptions engine{};
    std::optional<TimeGrid> grid;
};

struct ScenarioResult {
    std::vector<Snapshot> snapshots;
    ExcessSeries series;
};

/// Evolves the scenario; series normalizers are filled only for FDT normalization.
ScenarioResult run_scenario(const Scenario& scenario, const EngineOptions& options = {});

/// Both oscillators at temperature T; normalized diagonal excess curves.
ExcessSeries run_fig1_style(double temperature, double coupling, const ExperimentOptions& options = {});

struct Fig2Result {
    ExcessSeries series;
    double plateau_gap;      // |normalized1 - normalized2| at the last grid point
    double max_disturbance;  // max over t and i of |normalized_i(t) - normalized_i(0)|
};

Fig2Result run_fig2_style(double temperature1, double temperature2, double coupling,
                          const ExperimentOptions& options = {});

/// Both oscillators at T; use ExcessSeries::normalized12 for the curve.
ExcessSeries run_fig3_style(double temperature, double coupling, const ExperimentOptions& options = {});

/// One row per (T, coupling), ordered by temperature then coupling, from the
/// stationary closed form. Points run on options.engine.threads workers.
std::vector<SweepRow> run_fig4_sweep(const SweepSpec& spec, const ExperimentOptions& options = {});

} // namespace qexcess
