#include "qexcess/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qexcess/errors.hpp"

namespace qexcess {

namespace {

CheckResult finish(std::string name, double metric, double tolerance, std::string detail = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.metric = metric;
    r.tolerance = tolerance;
    r.passed = std::isfinite(metric) && metric <= tolerance;
    r.detail = std::move(detail);
    return r;
}

std::vector<double> linear_times(double stop, int points) {
    std::vector<double> t(points);
    for (int k = 0; k < points; ++k) {
        t[k] = stop * k / double(points - 1);
    }
    return t;
}

double reduced_relative(const Eigen::Matrix4d& value, const Eigen::Matrix4d& reference) {
    const double norm = reference.norm();
    return norm == 0.0 ? (value - reference).norm() : (value - reference).norm() / norm;
}

} // namespace

CheckResult check_greens_dual_path(const SystemConfig& config, int points, double span_gamma,
                                   double tolerance) {
    const ReducedModel model = ReducedModel::from(config);
    const GreensFunction greens(model);
    const auto times = linear_times(span_gamma / model.damping[0], points);
    const auto fast = greens.response_series(times, GreensPath::residues);
    const auto slow = greens.response_series(times, GreensPath::ode);
    double worst = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const auto a = greens.kick_response(fast[k]);
        const auto b = greens.kick_response(slow[k]);
        worst = std::max(worst, (a - b).norm() / b.norm());
    }
    return finish("greens_residues_vs_ode", worst, tolerance);
}

CheckResult check_classical_oracle(const SystemConfig& config, const EngineOptions& options, int points,
                                   double span_gamma, double tolerance) {
    const CovarianceEngine engine(config, options);
    const auto times = linear_times(span_gamma / config.osc1().damping, points);
    const CovarianceMatrix zero;
    const auto oracle = classical_covariance_lyapunov(config, zero, times);
    double worst = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        worst = std::max(worst, relative_difference(engine.model(),
                                                    engine.noise_covariance(times[k], Mode::classical),
                                                    oracle[k]));
    }
    return finish("classical_closed_form_vs_lyapunov", worst, tolerance);
}

CheckResult check_steady_limit(const SystemConfig& config, const EngineOptions& options, double tolerance) {
    const CovarianceEngine engine(config, options);
    const CovarianceMatrix initial = ground_state_covariance(config, options.constants);
    const double t = 50.0 / config.osc1().damping;
    double worst = 0.0;
    for (Mode mode : {Mode::quantum, Mode::classical}) {
        worst = std::max(worst, relative_difference(engine.model(), engine.covariance(initial, t, mode),
                                                    engine.steady_state_covariance(mode)));
    }
    return finish("stationary_vs_long_transient", worst, tolerance);
}

CheckResult check_noise_routes(const SystemConfig& config, const EngineOptions& options, double tolerance) {
    EngineOptions o = options;
    o.route = NoiseRoute::automatic;
    const CovarianceEngine engine(config, o);
    if (engine.route() != NoiseRoute::residues) {
        return finish("excess_residues_vs_resolvent", 0.0, tolerance, "modal expansion degenerate; skipped");
    }
    double worst = 0.0;
    const double t_reduced = 5.0 * engine.model().frequency[0] / engine.model().damping[0];
    for (double t : {t_reduced, std::numeric_limits<double>::infinity()}) {
        worst = std::max(worst, reduced_relative(engine.reduced_excess_noise(t, NoiseRoute::residues),
                                                 engine.reduced_excess_noise(t, NoiseRoute::resolvent)));
    }
    return finish("excess_residues_vs_resolvent", worst, tolerance);
}

Eigen::Matrix4d extrapolate_to_zero(const std::vector<double>& x, const std::vector<Eigen::Matrix4d>& y) {
    if (x.empty() || x.size() != y.size()) {
        throw DomainError("extrapolation needs matching, non-empty samples");
    }
    std::vector<Eigen::Matrix4d> p = y;
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double xi = x[i];
            const double xj = x[i + level];
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    return p[0];
}

CheckResult check_zeta_extrapolation(const SystemConfig& config, const EngineOptions& options,
                                     const std::vector<double>& times_gamma, const std::vector<double>& zetas,
                                     double tolerance) {
    EngineOptions base = options;
    base.threads = 1;
    const CovarianceEngine classical(config, base);
    std::vector<double> x;
    for (double z : zetas) {
        x.push_back(z * z);
    }
    double worst = 0.0;
    std::string detail;
    for (double tg : times_gamma) {
        const double t = tg / config.osc1().damping;
        const double t_reduced = t * classical.model().scales.frequency;
        const Eigen::Matrix4d reference = classical.reduced_classical_noise(t_reduced);
        std::vector<Eigen::Matrix4d> samples;
        for (double z : zetas) {
            EngineOptions o = base;
            o.constants.hbar_scale = z;
            o.route = NoiseRoute::resolvent;
            const CovarianceEngine engine(config, o);
            const Eigen::Matrix4d phi = engine.greens().propagator(t_reduced, GreensPath::ode);
            const Eigen::Matrix4d start =
                engine.model().to_reduced(ground_state_covariance(config, o.constants).matrix());
            samples.push_back(phi * start * phi.transpose() + engine.reduced_quantum_noise_direct(t_reduced));
        }
        const double err = reduced_relative(extrapolate_to_zero(x, samples), reference);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%st=%g/gamma: %.3g", detail.empty() ? "" : "; ", tg, err);
        detail += buf;
        worst = std::max(worst, err);
    }
    return finish("hbar_to_zero_extrapolation", worst, tolerance, detail);
}

CheckResult check_physicality(const SystemConfig& config, const EngineOptions& options, int points,
                              double tolerance) {
    const CovarianceEngine engine(config, options);
    const auto quantum = validate_covariance(engine.steady_state_covariance(Mode::quantum), Mode::quantum,
                                             config, options.constants);
    double worst = quantum.scale > 0.0 ? -quantum.margin / quantum.scale : 0.0;
    const auto times = linear_times(30.0 / config.osc1().damping, points);
    const auto snapshots = engine.evolve(ground_state_covariance(config, options.constants), times);
    for (const auto& s : snapshots) {
        const auto r = validate_covariance(s.classical, Mode::classical, config, options.constants);
        if (r.scale > 0.0) {
            worst = std::max(worst, -r.margin / r.scale);
        }
    }
    return finish("uncertainty_and_positivity", std::max(worst, 0.0), tolerance);
}

std::vector<CheckResult> run_validation_suite(const SystemConfig& config, const EngineOptions& options) {
    return {
        check_greens_dual_path(config),
        check_classical_oracle(config, options),
        check_noise_routes(config, options),
        check_steady_limit(config, options),
        check_physicality(config, options),
        check_zeta_extrapolation(config, options),
    };
}

} // namespace qexcess
