#include "qexcess/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "qexcess/errors.hpp"
#include "qexcess/parallel.hpp"

namespace qexcess {

TimeGrid TimeGrid::standard(const SystemConfig& config, double span_gamma, int count) {
    return {0.0, span_gamma / config.osc1().damping, count, GridSpacing::linear};
}

void TimeGrid::validate() const {
    if (count < 2) {
        throw ConfigError("time grid needs at least 2 points");
    }
    if (!(start >= 0.0) || !std::isfinite(stop) || !(stop > start)) {
        throw ConfigError("time grid needs stop > start >= 0");
    }
    if (spacing == GridSpacing::log && !(start > 0.0)) {
        throw ConfigError("log-spaced time grid needs start > 0");
    }
}

std::vector<double> TimeGrid::points() const {
    validate();
    std::vector<double> out(count);
    const double n = count - 1;
    for (int k = 0; k < count; ++k) {
        if (spacing == GridSpacing::linear) {
            out[k] = start + (stop - start) * (k / n);
        } else {
            out[k] = start * std::pow(stop / start, k / n);
        }
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

CovarianceMatrix Scenario::initial_state(const PhysicalConstants& constants) const {
    if (initial_policy == InitialPolicy::ground_state) {
        return ground_state_covariance(config, constants);
    }
    if (!initial) {
        throw ConfigError("explicit initial policy needs an initial covariance");
    }
    return *initial;
}

void Scenario::validate() const {
    grid.validate();
    if (!modes.quantum && !modes.classical && !modes.excess) {
        throw ConfigError("scenario selects no output mode");
    }
    if (initial_policy == InitialPolicy::explicit_matrix && !initial) {
        throw ConfigError("explicit initial policy needs an initial covariance");
    }
}

SweepSpec SweepSpec::standard() {
    SweepSpec spec;
    const int n = 16;
    const double lo = 0.005;
    const double hi = 0.3;
    for (int k = 0; k < n; ++k) {
        spec.couplings.push_back(lo * std::pow(hi / lo, k / double(n - 1)));
    }
    spec.couplings.back() = hi;
    spec.temperatures = {5.0, 50.0, 100.0};
    return spec;
}

void SweepSpec::validate() const {
    if (couplings.empty() || temperatures.empty()) {
        throw ConfigError("sweep needs at least one coupling and one temperature");
    }
    for (double c : couplings) {
        if (!(c > 0.0 && c < 1.0)) {
            throw ConfigError("sweep couplings must lie in (0, 1)");
        }
    }
    for (double t : temperatures) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw ConfigError("sweep temperatures must be positive");
        }
    }
}

ScenarioResult run_scenario(const Scenario& scenario, const EngineOptions& options) {
    scenario.validate();
    const CovarianceEngine engine(scenario.config, options);
    const auto times = scenario.grid.points();
    const CovarianceMatrix initial = scenario.initial_state(options.constants);
    ScenarioResult result;
    result.snapshots = engine.evolve(initial, times);
    auto& series = result.series;
    const double gamma = scenario.config.osc1().damping;
    for (const auto& s : result.snapshots) {
        series.time_seconds.push_back(s.time);
        series.time_gamma.push_back(s.time * gamma);
        series.excess1.push_back(s.excess(0, 0));
        series.excess2.push_back(s.excess(2, 2));
        series.excess12.push_back(s.excess(0, 2));
    }
    if (scenario.normalization == Normalization::fdt) {
        series.normalizer1 = engine.fdt_variance(0, scenario.config.bath(0).temperature);
        series.normalizer2 = engine.fdt_variance(1, scenario.config.bath(1).temperature);
    }
    return result;
}

namespace {

Scenario figure_scenario(const std::string& name, double t1, double t2, double coupling,
                         const ExperimentOptions& options) {
    Scenario s;
    s.name = name;
    s.config = options.base.with_temperatures(t1, t2).with_normalized_coupling(coupling);
    s.grid = options.grid.value_or(TimeGrid::standard(s.config));
    return s;
}

} // namespace

ExcessSeries run_fig1_style(double temperature, double coupling, const ExperimentOptions& options) {
    return run_scenario(figure_scenario("fig1", temperature, temperature, coupling, options), options.engine)
        .series;
}

Fig2Result run_fig2_style(double temperature1, double temperature2, double coupling,
                          const ExperimentOptions& options) {
    Fig2Result r{run_scenario(figure_scenario("fig2", temperature1, temperature2, coupling, options),
                              options.engine)
                     .series,
                 0.0, 0.0};
    const auto& s = r.series;
    const std::size_t last = s.size() - 1;
    r.plateau_gap = std::abs(s.normalized1(last) - s.normalized2(last));
    for (std::size_t k = 0; k < s.size(); ++k) {
        r.max_disturbance = std::max({r.max_disturbance, std::abs(s.normalized1(k) - s.normalized1(0)),
                                      std::abs(s.normalized2(k) - s.normalized2(0))});
    }
    return r;
}

ExcessSeries run_fig3_style(double temperature, double coupling, const ExperimentOptions& options) {
    return run_scenario(figure_scenario("fig3", temperature, temperature, coupling, options), options.engine)
        .series;
}

std::vector<SweepRow> run_fig4_sweep(const SweepSpec& spec, const ExperimentOptions& options) {
    spec.validate();
    std::vector<SweepRow> rows;
    for (double t : spec.temperatures) {
        for (double c : spec.couplings) {
            rows.push_back({t, c, 0.0, 0.0, 0.0, 0.0});
        }
    }
    EngineOptions inner = options.engine;
    inner.threads = 1;
    parallel_for(rows.size(), options.engine.threads, [&](std::size_t k) {
        auto& row = rows[k];
        const SystemConfig config =
            options.base.with_temperatures(row.temperature, row.temperature).with_normalized_coupling(row.coupling);
        const CovarianceEngine engine(config, inner);
        row.excess12 = engine.steady_state_excess()(0, 2);
        row.normalizer1 = engine.fdt_variance(0, row.temperature);
        row.normalizer2 = engine.fdt_variance(1, row.temperature);
        row.normalized12 = row.excess12 / std::sqrt(row.normalizer1 * row.normalizer2);
    });
    return rows;
}

} // namespace qexcess
