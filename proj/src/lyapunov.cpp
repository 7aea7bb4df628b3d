#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "qexcess/dynamics.hpp"
#include "qexcess/errors.hpp"

namespace qexcess {

namespace {

using State = std::array<double, 16>;

} // namespace

std::vector<CovarianceMatrix> classical_covariance_lyapunov(const SystemConfig& config,
                                                            const CovarianceMatrix& initial,
                                                            std::span<const double> times) {
    namespace ode = boost::numeric::odeint;
    const ReducedModel model = ReducedModel::from(config);
    const Eigen::Matrix4d a = model.drift();
    Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
    for (int b = 0; b < 2; ++b) {
        d(2 * b + 1, 2 * b + 1) = 2.0 * model.mass[b] * model.damping[b] * model.theta[b];
    }

    auto rhs = [&](const State& s, State& ds, double) {
        Eigen::Map<const Eigen::Matrix4d> sigma(s.data());
        Eigen::Map<Eigen::Matrix4d> out(ds.data());
        out = a * sigma + sigma * a.transpose() + d;
    };

    State state{};
    Eigen::Map<Eigen::Matrix4d>(state.data()) = model.to_reduced(initial.matrix());

    std::vector<double> observe{0.0};
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1])) {
            throw DomainError("times must be non-negative and non-decreasing");
        }
        observe.push_back(times[k] * model.scales.frequency);
    }

    std::vector<CovarianceMatrix> out;
    out.reserve(times.size());
    bool skipped_origin = false;
    auto record = [&](const State& s, double) {
        if (!skipped_origin) {
            skipped_origin = true;
            return;
        }
        Eigen::Matrix4d sigma = Eigen::Map<const Eigen::Matrix4d>(s.data());
        sigma = 0.5 * (sigma + sigma.transpose());
        out.push_back(CovarianceMatrix::from_matrix(model.to_cgs(sigma)));
    };

    auto stepper = ode::make_controlled(1e-12, 1e-10, ode::runge_kutta_fehlberg78<State>());
    try {
        ode::integrate_times(stepper, rhs, state, observe.begin(), observe.end(), 0.05, record);
    } catch (const std::exception& e) {
        throw OdeError(std::string("Lyapunov integration failed: ") + e.what());
    }
    if (out.size() != times.size()) {
        throw OdeError("Lyapunov integration returned an incomplete series");
    }
    return out;
}

CovarianceMatrix classical_covariance_lyapunov(const SystemConfig& config,
                                               const CovarianceMatrix& initial, double t) {
    const double times[] = {t};
    return classical_covariance_lyapunov(config, initial, times).front();
}

} // namespace qexcess
