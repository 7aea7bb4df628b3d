#include "doctest.h"

#include <cmath>

#include "qexcess/errors.hpp"
#include "qexcess/experiments.hpp"

using namespace qexcess;

namespace {

ExperimentOptions short_run(double span_gamma = 30.0, int points = 16) {
    ExperimentOptions o;
    o.grid = TimeGrid::standard(o.base, span_gamma, points);
    return o;
}

} // namespace

TEST_CASE("time grids") {
    const auto g = TimeGrid::standard(SystemConfig::reference_system());
    CHECK(g.count == 400);
    CHECK(g.start == 0.0);
    CHECK(g.stop == doctest::Approx(30.0 / 1e11));
    const auto pts = g.points();
    CHECK(pts.size() == 400);
    CHECK(pts.front() == 0.0);
    CHECK(pts.back() == g.stop);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        CHECK(pts[k] > pts[k - 1]);
    }
    const TimeGrid lg{1e-13, 1e-10, 4, GridSpacing::log};
    const auto lp = lg.points();
    CHECK(lp[1] == doctest::Approx(1e-12));
    CHECK(lp[2] == doctest::Approx(1e-11));

    CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((TimeGrid{1.0, 1.0, 10}.validate()), ConfigError);
    CHECK_THROWS_AS((TimeGrid{0.0, 1.0, 10, GridSpacing::log}.validate()), ConfigError);
}

TEST_CASE("sweep specification") {
    const auto s = SweepSpec::standard();
    REQUIRE(s.couplings.size() == 16);
    CHECK(s.couplings.front() == doctest::Approx(0.005));
    CHECK(s.couplings.back() == 0.3);
    CHECK(s.couplings[1] / s.couplings[0] == doctest::Approx(s.couplings[15] / s.couplings[14]));
    CHECK(s.temperatures == std::vector<double>{5.0, 50.0, 100.0});
    CHECK_THROWS_AS((SweepSpec{{0.0}, {5.0}}.validate()), ConfigError);
    CHECK_THROWS_AS((SweepSpec{{1.0}, {5.0}}.validate()), ConfigError);
    CHECK_THROWS_AS((SweepSpec{{0.1}, {0.0}}.validate()), ConfigError);
    CHECK_THROWS_AS((SweepSpec{{}, {5.0}}.validate()), ConfigError);
}

TEST_CASE("identical oscillators give coinciding curves") {
    auto o = short_run(30.0, 12);
    const OscillatorParams same{1e-23, 1e13, 1e11};
    o.base = SystemConfig(same, same, {300.0}, {300.0}, 0.0);
    const auto s = run_fig1_style(30.0, 0.01, o);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(std::abs(s.normalized1(k) - s.normalized2(k)) <= 1e-10 * std::abs(s.normalized1(k)));
    }
}

TEST_CASE("figure-1 style curves at high and low temperature") {
    const auto hot = run_fig1_style(300.0, 0.01, short_run());
    const auto cold = run_fig1_style(30.0, 0.01, short_run());
    const auto last = hot.size() - 1;
    CHECK(hot.normalized1(last) < 0.05);
    CHECK(hot.normalized2(last) < 0.05);
    CHECK(cold.normalized1(last) > 0.2);
    CHECK(std::abs(cold.normalized1(last) - cold.normalized2(last)) > 0.01);
}

TEST_CASE("weak coupling limit reproduces independent oscillators") {
    const auto o = short_run(30.0, 10);
    const auto coupled = run_fig2_style(30.0, 300.0, 1e-7, o);
    const auto single = run_fig2_style(30.0, 300.0, 0.0, o);
    for (std::size_t k = 0; k < coupled.series.size(); ++k) {
        CHECK(coupled.series.normalized1(k) == doctest::Approx(single.series.normalized1(k)).epsilon(1e-8));
        CHECK(coupled.series.normalized2(k) == doctest::Approx(single.series.normalized2(k)).epsilon(1e-8));
    }
    CHECK(single.plateau_gap > 0.0);
}

TEST_CASE("figure-3 style curve vanishes without coupling") {
    const auto s = run_fig3_style(30.0, 0.0, short_run(30.0, 8));
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s.normalized12(k) == 0.0);
    }
}

TEST_CASE("figure-4 style sweep") {
    SweepSpec spec{{0.001, 0.05, 0.2}, {100.0, 5.0}};
    ExperimentOptions o;
    o.engine.threads = 2;
    const auto rows = run_fig4_sweep(spec, o);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].temperature == 100.0);
    CHECK(rows[0].coupling == 0.001);
    CHECK(rows[5].temperature == 5.0);
    CHECK(rows[5].coupling == 0.2);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(rows[3 + k].normalized12) > std::abs(rows[k].normalized12));
    }
    CHECK(std::abs(rows[3].normalized12) < 0.01 * std::abs(rows[5].normalized12));

    o.engine.threads = 1;
    const auto serial = run_fig4_sweep(spec, o);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(serial[k].normalized12 == rows[k].normalized12);
    }

    // Stationary value vs the end of a long transient.
    const auto config = SystemConfig::reference_system(0.2, 5.0, 5.0);
    const CovarianceEngine e(config);
    const double late[] = {60.0 / config.osc1().damping};
    const auto transient = e.evolve(ground_state_covariance(config), late).front().excess(0, 2);
    CHECK(transient == doctest::Approx(rows[5].excess12).epsilon(1e-3));
}

TEST_CASE("explicit initial state") {
    Scenario s;
    s.initial_policy = InitialPolicy::explicit_matrix;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.initial = CovarianceMatrix::from_matrix(2.0 * ground_state_covariance(s.config).matrix());
    s.grid = TimeGrid::standard(s.config, 1.0, 3);
    const auto r = run_scenario(s);
    CHECK(r.snapshots.front().excess(0, 0) == doctest::Approx(2.0 * ground_state_covariance(s.config)(0, 0)));
    s.normalization = Normalization::none;
    CHECK(run_scenario(s).series.normalizer1 == 0.0);
}
