#include "doctest.h"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracle_values.hpp"
#include "qexcess/errors.hpp"
#include "qexcess/greens.hpp"
#include "qexcess/validation.hpp"

using namespace qexcess;

TEST_CASE("transfer matrix and susceptibility") {
    const auto c = SystemConfig::reference_system(0.2);
    const double w = 1.05e13;
    const auto chi = susceptibility(c, w);
    const auto& ref = oracle::kSusceptibilityAt105e13;
    CHECK(chi(0, 0).real() == doctest::Approx(ref[0]).epsilon(1e-12));
    CHECK(chi(0, 0).imag() == doctest::Approx(ref[1]).epsilon(1e-12));
    CHECK(chi(0, 1).real() == doctest::Approx(ref[2]).epsilon(1e-12));
    CHECK(chi(0, 1).imag() == doctest::Approx(ref[3]).epsilon(1e-12));
    CHECK(chi(1, 1).real() == doctest::Approx(ref[4]).epsilon(1e-12));
    CHECK(chi(1, 1).imag() == doctest::Approx(ref[5]).epsilon(1e-12));
    CHECK(chi(1, 0) == chi(0, 1));
    const Eigen::Matrix2cd product = transfer_matrix(c, w) * chi;
    CHECK((product - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    // Dissipation: Im chi is positive semidefinite for w > 0.
    CHECK(chi(0, 0).imag() > 0.0);
    CHECK(chi(1, 1).imag() > 0.0);
}

TEST_CASE("quartic roots") {
    // (s + 1)(s + 2)(s^2 + 2s + 5) = s^4 + 5 s^3 + 13 s^2 + 19 s + 10
    const auto r = quartic_roots({10.0, 19.0, 13.0, 5.0});
    CHECK(std::abs(r[0] - Complex(-1, -2)) < 1e-13);
    CHECK(std::abs(r[3] - Complex(-1, 2)) < 1e-13);
    CHECK(std::abs(r[1] - Complex(-2, 0)) < 1e-13);
    CHECK(std::abs(r[2] - Complex(-1, 0)) < 1e-13);
}

TEST_CASE("modal expansion satisfies the initial conditions of an impulse") {
    for (double coupling : {0.0, 0.01, 0.2, -0.6}) {
        const auto model = ReducedModel::from(SystemConfig::reference_system(coupling));
        const ModalExpansion modes(model);
        CHECK_FALSE(modes.degenerate());
        const auto r = modes.evaluate(0.0);
        CHECK(r.position.norm() < 1e-14);
        CHECK(r.velocity(0, 0) == doctest::Approx(1.0 / model.mass[0]).epsilon(1e-13));
        CHECK(r.velocity(1, 1) == doctest::Approx(1.0 / model.mass[1]).epsilon(1e-13));
        CHECK(std::abs(r.velocity(0, 1)) < 1e-14);
        for (const auto& pole : modes.poles()) {
            CHECK(pole.rate.real() < 0.0);
        }
        CHECK(modes.decay_rate() > 0.0);
    }
}

TEST_CASE("residue and ODE paths agree") {
    for (double coupling : {0.01, 0.2}) {
        const auto result = check_greens_dual_path(SystemConfig::reference_system(coupling));
        CHECK(result.passed);
        CHECK(result.metric < 1e-6);
    }
}

TEST_CASE("propagator equals the matrix exponential of the drift") {
    const auto c = SystemConfig::reference_system(0.2, 30.0, 300.0);
    const auto model = ReducedModel::from(c);
    const GreensFunction g(model);
    const Eigen::Matrix4d a = model.drift();
    CHECK((g.propagator(0.0) - Eigen::Matrix4d::Identity()).norm() < 1e-13);
    for (double t : {0.3, 7.0, 150.0, 1200.0}) {
        const Eigen::Matrix4d expected = (a * t).exp();
        CHECK((g.propagator(t) - expected).norm() < 1e-10 * std::max(1.0, expected.norm()));
        CHECK((g.propagator(t, GreensPath::ode) - expected).norm() < 1e-9 * std::max(1.0, expected.norm()));
    }
    // CGS wrapper: Phi maps phase vectors, so it is dimensionless on the diagonal blocks.
    const double t = 2e-12;
    const Eigen::Matrix4d phys = propagator(c, t);
    const Eigen::Matrix4d expected = (a * (t * 1e13)).exp();
    CHECK(phys(0, 0) == doctest::Approx(expected(0, 0)).epsilon(1e-10));
    CHECK(phys(0, 1) == doctest::Approx(expected(0, 1) / (1e-23 * 1e13)).epsilon(1e-10));
}

TEST_CASE("decoupled oscillators respond independently") {
    const auto c = SystemConfig::reference_system(0.0);
    const auto r = impulse_response(c, 3e-13);
    CHECK(r.position(0, 1) == 0.0);
    const double w = std::sqrt(1e26 - 0.25e22);
    const double expected = std::exp(-0.5e11 * 3e-13) * std::sin(w * 3e-13) / (1e-23 * w);
    CHECK(r.position(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("near-coincident poles are flagged and routed to the ODE path") {
    OscillatorParams same{1e-23, 1e13, 1e11};
    const SystemConfig c(same, same, {300.0}, {300.0}, 0.0);
    const auto degenerate = c.with_normalized_coupling(1e-9);
    const auto model = ReducedModel::from(degenerate);
    const GreensFunction g(model);
    CHECK(g.modes().degenerate());
    CHECK_FALSE(g.residues_usable());
    const Eigen::Matrix4d expected = (model.drift() * 50.0).exp();
    CHECK((g.propagator(50.0) - expected).norm() < 1e-9);
    CHECK_FALSE(GreensFunction(ReducedModel::from(c)).modes().degenerate());
}

TEST_CASE("response times must be ordered") {
    const GreensFunction g(ReducedModel::from(SystemConfig::reference_system()));
    const double bad[] = {2.0, 1.0};
    CHECK_THROWS_AS(g.response_series(bad), DomainError);
    const double negative[] = {-1.0};
    CHECK_THROWS_AS(g.response_series(negative), DomainError);
}
