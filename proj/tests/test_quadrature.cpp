#include "doctest.h"

#include <cmath>
#include <complex>

#include "qexcess/constants.hpp"
#include "qexcess/quadrature.hpp"

using namespace qexcess;

TEST_CASE("adaptive Gauss-Kronrod") {
    auto sine = [](double x) { return std::sin(x); };
    CHECK(integrate_adaptive(sine, 0.0, kPi, {}, 1e-13, 0.0) == doctest::Approx(2.0).epsilon(1e-13));

    // Narrow Lorentzian: int_0^2 g / ((x - 1)^2 + g^2) dx = 2 atan(1/g).
    const double g = 1e-4;
    auto peak = [g](double x) { return g / ((x - 1.0) * (x - 1.0) + g * g); };
    const double exact = 2.0 * std::atan(1.0 / g);
    CHECK(integrate_adaptive(peak, 0.0, 2.0, {}, 1e-12, 0.0) == doctest::Approx(exact).epsilon(1e-11));
    const double cut[] = {1.0};
    CHECK(integrate_adaptive(peak, 0.0, 2.0, cut, 1e-12, 0.0) == doctest::Approx(exact).epsilon(1e-11));

    auto phase = [](double x) { return std::polar(1.0, 3.0 * x); };
    const std::complex<double> z = integrate_adaptive(phase, 0.0, 1.0, {}, 1e-13, 0.0);
    const std::complex<double> expected = (std::polar(1.0, 3.0) - 1.0) / std::complex<double>(0.0, 3.0);
    CHECK(std::abs(z - expected) < 1e-13);

    auto wild = [](double x) { return std::sin(1.0 / (x + 1e-300)); };
    CHECK_THROWS_AS(integrate_adaptive(wild, 0.0, 1.0, {}, 1e-15, 0.0, 50), QuadratureError);
}

TEST_CASE("semi-infinite integrals") {
    auto inv_sq = [](double x) { return 1.0 / (x * x); };
    CHECK(integrate_to_infinity(inv_sq, 2.0, 1e-13, 0.0) == doctest::Approx(0.5).epsilon(1e-13));
    auto lorentz = [](double x) { return 1.0 / (1.0 + x * x); };
    CHECK(integrate_to_infinity(lorentz, 1.0, 1e-12, 0.0) == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_to_infinity(lorentz, 0.0, 1e-12, 0.0), QuadratureError);
}

TEST_CASE("Gauss-Legendre rules") {
    for (int order : {1, 2, 5, 20, 32}) {
        const auto& rule = gauss_legendre(order);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
        double sum = 0.0;
        double moment = 0.0;
        const int degree = 2 * order - 2;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            sum += rule.weights[k];
            moment += rule.weights[k] * std::pow(rule.nodes[k], degree);
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(moment == doctest::Approx(2.0 / (degree + 1)).epsilon(1e-13));
    }
    CHECK(&gauss_legendre(20) == &gauss_legendre(20));
}

TEST_CASE("graded panels") {
    PanelSpec spec;
    spec.lower = 0.0;
    spec.upper = 10.0;
    spec.max_width = 1.0;
    spec.breakpoints = {3.0};
    spec.poles = {{3.0, 1e-3}};
    const auto panels = build_panels(spec);
    REQUIRE_FALSE(panels.empty());
    CHECK(panels.front().lo == 0.0);
    CHECK(panels.back().hi == 10.0);
    double smallest = 1.0;
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const auto& p = panels[k];
        CHECK(p.hi > p.lo);
        CHECK(p.hi - p.lo <= 1.0 + 1e-12);
        if (k > 0) {
            CHECK(p.lo == panels[k - 1].hi);
        }
        const double gap = std::max({0.0, p.lo - 3.0, 3.0 - p.hi});
        CHECK(p.hi - p.lo <= 2.0 * std::max(1e-3, gap) + 1e-15);
        smallest = std::min(smallest, p.hi - p.lo);
    }
    CHECK(smallest <= 2e-3);

    spec.poles.clear();
    spec.oscillation_time = 100.0;
    for (const auto& p : build_panels(spec)) {
        CHECK(p.hi - p.lo <= 4.0 * kPi / 100.0 + 1e-12);
    }

    // Integrating the pole-refined panels reproduces the Lorentzian.
    spec.oscillation_time = 0.0;
    spec.poles = {{3.0, 1e-3}};
    double total = 0.0;
    for (const auto& n : panel_nodes(build_panels(spec), 20)) {
        total += n.weight * 1e-3 / ((n.x - 3.0) * (n.x - 3.0) + 1e-6);
    }
    CHECK(total == doctest::Approx(std::atan(3.0 / 1e-3) + std::atan(7.0 / 1e-3)).epsilon(1e-12));
}
