#include "qexcess/greens.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "qexcess/errors.hpp"

namespace qexcess {

TransferMatrix transfer_matrix(const SystemConfig& config, double omega) {
    TransferMatrix k;
    for (int a = 0; a < 2; ++a) {
        const auto& osc = config.oscillator(a);
        const double w0 = osc.eigenfrequency;
        k(a, a) = osc.mass * Complex(w0 * w0 - omega * omega, -osc.damping * omega);
    }
    k(0, 1) = config.coupling();
    k(1, 0) = config.coupling();
    return k;
}

Eigen::Matrix2cd susceptibility(const SystemConfig& config, double omega) {
    const TransferMatrix k = transfer_matrix(config, omega);
    const Complex det = k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0);
    const double scale = k.squaredNorm();
    if (!(std::abs(det) >= 1e-14 * scale)) {
        throw SingularMatrixError("transfer matrix is singular at this frequency");
    }
    Eigen::Matrix2cd chi;
    chi(0, 0) = k(1, 1) / det;
    chi(1, 1) = k(0, 0) / det;
    chi(0, 1) = -k(0, 1) / det;
    chi(1, 0) = -k(1, 0) / det;
    return chi;
}

namespace {

Complex eval_quartic(const std::array<double, 4>& c, Complex s) {
    return (((s + c[3]) * s + c[2]) * s + c[1]) * s + c[0];
}

Complex eval_quartic_derivative(const std::array<double, 4>& c, Complex s) {
    return ((4.0 * s + 3.0 * c[3]) * s + 2.0 * c[2]) * s + c[1];
}

double quartic_scale(const std::array<double, 4>& c, Complex s) {
    const double r = std::abs(s);
    return (((r + std::abs(c[3])) * r + std::abs(c[2])) * r + std::abs(c[1])) * r + std::abs(c[0]);
}

} // namespace

std::array<Complex, 4> quartic_roots(const std::array<double, 4>& c) {
    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(3, 2) = 1.0;
    for (int k = 0; k < 4; ++k) {
        companion(k, 3) = -c[k];
    }
    Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw RootFindingError("companion eigenvalue solver failed");
    }
    std::array<Complex, 4> roots;
    for (int k = 0; k < 4; ++k) {
        Complex s = solver.eigenvalues()(k);
        for (int iter = 0; iter < 8; ++iter) {
            const Complex d = eval_quartic_derivative(c, s);
            if (d == Complex(0.0)) {
                break;
            }
            const Complex step = eval_quartic(c, s) / d;
            s -= step;
            if (std::abs(step) <= 1e-15 * std::abs(s)) {
                break;
            }
        }
        if (!(std::abs(eval_quartic(c, s)) <= 1e-12 * quartic_scale(c, s))) {
            throw RootFindingError("quartic root did not converge to 1e-12 relative");
        }
        roots[k] = s;
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.imag() != b.imag()) {
            return a.imag() < b.imag();
        }
        return a.real() < b.real();
    });
    return roots;
}

ModalExpansion::ModalExpansion(const ReducedModel& m) : mass_(m.mass) {
    const double lambda = m.coupling;
    if (lambda == 0.0) {
        for (int a = 0; a < 2; ++a) {
            const double g = m.damping[a];
            const double w = m.frequency[a];
            const double omega = std::sqrt(w * w - 0.25 * g * g);
            for (double sign : {-1.0, 1.0}) {
                const Complex s(-0.5 * g, sign * omega);
                Pole pole{s, Eigen::Matrix2cd::Zero()};
                pole.residue(a, a) = 1.0 / (m.mass[a] * (2.0 * s + g));
                poles_.push_back(pole);
            }
        }
        return;
    }
    const double g1 = m.damping[0];
    const double g2 = m.damping[1];
    const double w1 = m.frequency[0] * m.frequency[0];
    const double w2 = m.frequency[1] * m.frequency[1];
    const double mm = m.mass[0] * m.mass[1];
    // (s^2 + g1 s + w1)(s^2 + g2 s + w2) - lambda^2 / (M1 M2)
    const std::array<double, 4> c{w1 * w2 - lambda * lambda / mm, g1 * w2 + g2 * w1,
                                  w1 + w2 + g1 * g2, g1 + g2};
    const auto roots = quartic_roots(c);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (std::abs(roots[i] - roots[j]) < 1e-6 * std::abs(roots[i])) {
                degenerate_ = true;
            }
        }
    }
    for (const Complex s : roots) {
        const Complex p1 = (s + g1) * s + w1;
        const Complex p2 = (s + g2) * s + w2;
        const Complex dd = mm * eval_quartic_derivative(c, s);
        Pole pole{s, Eigen::Matrix2cd::Zero()};
        pole.residue(0, 0) = m.mass[1] * p2 / dd;
        pole.residue(1, 1) = m.mass[0] * p1 / dd;
        pole.residue(0, 1) = -lambda / dd;
        pole.residue(1, 0) = -lambda / dd;
        poles_.push_back(pole);
    }
}

ImpulseResponse ModalExpansion::evaluate(double t) const {
    Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd gdot = Eigen::Matrix2cd::Zero();
    for (const auto& pole : poles_) {
        const Complex e = std::exp(pole.rate * t);
        g += pole.residue * e;
        gdot += pole.residue * (pole.rate * e);
    }
    return {g.real(), gdot.real()};
}

Eigen::Matrix<Complex, 4, 2> ModalExpansion::phase_residue(std::size_t k) const {
    const Pole& pole = poles_.at(k);
    Eigen::Matrix<Complex, 4, 2> a;
    for (int i = 0; i < 2; ++i) {
        for (int b = 0; b < 2; ++b) {
            a(2 * i, b) = pole.residue(i, b);
            a(2 * i + 1, b) = mass_[i] * pole.rate * pole.residue(i, b);
        }
    }
    return a;
}

double ModalExpansion::decay_rate() const {
    double rate = std::abs(poles_.front().rate.real());
    for (const auto& pole : poles_) {
        rate = std::min(rate, std::abs(pole.rate.real()));
    }
    return rate;
}

GreensFunction::GreensFunction(const ReducedModel& model) : model_(model), modes_(model) {}

ImpulseResponse GreensFunction::response(double t, GreensPath path) const {
    const double times[] = {t};
    return response_series(times, path).front();
}

std::vector<ImpulseResponse> GreensFunction::response_series(std::span<const double> times,
                                                             GreensPath path) const {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && times[i] < times[i - 1])) {
            throw DomainError("response times must be non-negative and non-decreasing");
        }
    }
    if (path == GreensPath::residues && residues_usable()) {
        std::vector<ImpulseResponse> out;
        out.reserve(times.size());
        for (double t : times) {
            out.push_back(modes_.evaluate(t));
        }
        return out;
    }
    return integrate_ode(times);
}

std::vector<ImpulseResponse> GreensFunction::integrate_ode(std::span<const double> times) const {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 8>;  // two phase-space columns
    const Eigen::Matrix4d a = model_.drift();
    auto rhs = [&a](const State& y, State& dy, double) {
        for (int col = 0; col < 2; ++col) {
            for (int i = 0; i < 4; ++i) {
                double acc = 0.0;
                for (int j = 0; j < 4; ++j) {
                    acc += a(i, j) * y[4 * col + j];
                }
                dy[4 * col + i] = acc;
            }
        }
    };
    State y{};
    y[1] = 1.0;      // column 0: unit momentum kick on oscillator 1
    y[4 + 3] = 1.0;  // column 1: unit momentum kick on oscillator 2

    std::vector<double> grid{0.0};
    grid.insert(grid.end(), times.begin(), times.end());
    std::vector<ImpulseResponse> out;
    out.reserve(times.size());
    bool skip_origin = true;
    auto observer = [&](const State& s, double) {
        if (skip_origin) {
            skip_origin = false;
            return;
        }
        ImpulseResponse r;
        for (int b = 0; b < 2; ++b) {
            for (int i = 0; i < 2; ++i) {
                r.position(i, b) = s[4 * b + 2 * i];
                r.velocity(i, b) = s[4 * b + 2 * i + 1] / model_.mass[i];
            }
        }
        out.push_back(r);
    };
    try {
        auto stepper = odeint::make_controlled(1e-15, 1e-13, odeint::runge_kutta_fehlberg78<State>());
        odeint::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), 1e-3, observer);
    } catch (const std::exception& e) {
        throw OdeError(std::string("impulse-response integration failed: ") + e.what());
    }
    return out;
}

Eigen::Matrix<double, 4, 2> GreensFunction::kick_response(const ImpulseResponse& r) const {
    Eigen::Matrix<double, 4, 2> w;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            w(2 * a, b) = r.position(a, b);
            w(2 * a + 1, b) = model_.mass[a] * r.velocity(a, b);
        }
    }
    return w;
}

Eigen::Matrix4d GreensFunction::propagator_from(const ImpulseResponse& r) const {
    const auto& m = model_;
    // Second derivative from the equations of motion.
    Eigen::Matrix2d gddot;
    for (int a = 0; a < 2; ++a) {
        const int other = 1 - a;
        for (int b = 0; b < 2; ++b) {
            gddot(a, b) = -m.damping[a] * r.velocity(a, b)
                          - m.frequency[a] * m.frequency[a] * r.position(a, b)
                          - m.coupling / m.mass[a] * r.position(other, b);
        }
    }
    Eigen::Matrix4d phi;
    for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 2; ++c) {
            const double mc = m.mass[c];
            const double gc = m.damping[c];
            phi(2 * a, 2 * c) = mc * (r.velocity(a, c) + gc * r.position(a, c));
            phi(2 * a + 1, 2 * c) = m.mass[a] * mc * (gddot(a, c) + gc * r.velocity(a, c));
            phi(2 * a, 2 * c + 1) = r.position(a, c);
            phi(2 * a + 1, 2 * c + 1) = m.mass[a] * r.velocity(a, c);
        }
    }
    return phi;
}

Eigen::Matrix4d GreensFunction::propagator(double t, GreensPath path) const {
    return propagator_from(response(t, path));
}

ImpulseResponse impulse_response(const SystemConfig& config, double t, GreensPath path) {
    const auto model = ReducedModel::from(config);
    GreensFunction greens(model);
    const double tr = t * model.scales.frequency;
    ImpulseResponse r = greens.response(tr, path);
    r.position /= model.scales.mass * model.scales.frequency;
    r.velocity /= model.scales.mass;
    return r;
}

Eigen::Matrix4d propagator(const SystemConfig& config, double t, GreensPath path) {
    const auto model = ReducedModel::from(config);
    GreensFunction greens(model);
    const Eigen::Matrix4d phi = greens.propagator(t * model.scales.frequency, path);
    const Eigen::Vector4d u = model.scales.phase_units();
    return u.asDiagonal() * phi * u.cwiseInverse().asDiagonal();
}

} // namespace qexcess
