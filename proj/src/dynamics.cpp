#include "qexcess/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qexcess/bath.hpp"
#include "qexcess/constants.hpp"
#include "qexcess/errors.hpp"
#include "qexcess/parallel.hpp"
#include "qexcess/quadrature.hpp"

namespace qexcess {

namespace {

constexpr int kPanelOrder = 20;
constexpr std::array<int, 2> kMomentum{1, 3};

Eigen::Matrix4d symmetrize(const Eigen::Matrix4d& m) {
    return 0.5 * (m + m.transpose());
}

bool is_infinite(double t) {
    return std::isinf(t) && t > 0.0;
}

} // namespace

CoordinateMoments beta_to_covariance(const BetaForm& beta) {
    const double det = beta.b11 * beta.b22 - beta.b12 * beta.b12;
    if (!(beta.b11 > 0.0) || !(beta.b22 > 0.0) || !(det > 0.0)) {
        throw DegenerateFormError("beta form is not positive definite");
    }
    return {beta.b22 / det, beta.b11 / det, beta.b12 / det};
}

BetaForm covariance_to_beta(const CoordinateMoments& m) {
    const double det = m.x1x1 * m.x2x2 - m.x1x2 * m.x1x2;
    if (!(m.x1x1 > 0.0) || !(m.x2x2 > 0.0) || !(det > 0.0)) {
        throw DegenerateFormError("coordinate moments are not positive definite");
    }
    return {m.x2x2 / det, m.x1x2 / det, m.x1x1 / det};
}

double ExcessSeries::normalized12(std::size_t k) const {
    return excess12[k] / std::sqrt(normalizer1 * normalizer2);
}

CovarianceEngine::CovarianceEngine(const SystemConfig& config, const EngineOptions& options)
    : config_(config),
      options_(options),
      model_(ReducedModel::from(config, options.constants)),
      greens_(model_),
      route_(options.route),
      omega_max_(0.0),
      drift_(model_.drift()) {
    options_.constants.validate();
    if (!(options_.omega_max_factor > 1.0) || !std::isfinite(options_.omega_max_factor)) {
        throw ConfigError("omega_max_factor must be finite and greater than 1");
    }
    omega_max_ = options_.omega_max_factor * std::max(model_.frequency[0], model_.frequency[1]);
    if (route_ == NoiseRoute::automatic) {
        route_ = greens_.residues_usable() ? NoiseRoute::residues : NoiseRoute::resolvent;
    }
    if (route_ == NoiseRoute::residues && !greens_.residues_usable()) {
        throw DegenerateFormError("modal expansion is degenerate; use the resolvent route");
    }
    if (greens_.residues_usable()) {
        const auto poles = greens_.modes().poles();
        for (std::size_t k = 0; k < poles.size(); ++k) {
            rates_.push_back(poles[k].rate);
            residues_.push_back(greens_.modes().phase_residue(k));
        }
        transforms_at_zero_ = excess_transforms(0.0);
    }
}

double CovarianceEngine::bath_weight(int b) const {
    return model_.mass[b] * model_.damping[b] / kPi;
}

std::vector<QuadratureNode> CovarianceEngine::frequency_nodes(double t) const {
    PanelSpec spec;
    spec.lower = 0.0;
    spec.upper = omega_max_;
    spec.max_width = 0.5;
    for (const auto& pole : greens_.modes().poles()) {
        const double center = std::abs(pole.rate.imag());
        spec.breakpoints.push_back(center);
        spec.poles.emplace_back(center, std::abs(pole.rate.real()));
    }
    if (model_.zeta > 0.0) {
        for (double theta : model_.theta) {
            if (theta > 0.0) {
                spec.origin_poles.push_back(2.0 * kPi * theta / model_.zeta);
            }
        }
    }
    if (t > 0.0 && std::isfinite(t)) {
        spec.oscillation_time = t;
    }
    return panel_nodes(build_panels(spec), kPanelOrder);
}

CovarianceEngine::Transforms CovarianceEngine::excess_transforms(double t) const {
    Transforms tr{};
    if (model_.zeta == 0.0) {
        return tr;
    }
    const std::size_t n = rates_.size();
    const bool shared_bath = model_.theta[0] == model_.theta[1];
    for (const auto& node : frequency_nodes(t)) {
        const double w = node.x;
        const Complex phase = std::polar(1.0, w * t);
        std::array<double, 2> dn{};
        dn[0] = node.weight * reduced_excess_spectrum(w, model_.theta[0], model_.zeta);
        dn[1] = shared_bath ? dn[0]
                            : node.weight * reduced_excess_spectrum(w, model_.theta[1], model_.zeta);
        for (std::size_t k = 0; k < n; ++k) {
            const Complex g = 1.0 / (rates_[k] + Complex(0.0, w));
            const Complex pg = phase * g;
            const Complex qg = phase * std::conj(g);
            for (int b = 0; b < 2; ++b) {
                tr.p[b][k] += dn[b] * pg;
                tr.q[b][k] += dn[b] * qg;
            }
        }
    }
    return tr;
}

Eigen::Matrix4d CovarianceEngine::excess_from_transforms(double t, const Transforms& tr) const {
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    const bool steady = is_infinite(t);
    const auto& p0 = transforms_at_zero_.p;
    const std::size_t n = rates_.size();
    for (int b = 0; b < 2; ++b) {
        const double weight = bath_weight(b);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
                const Complex sum = rates_[k] + std::conj(rates_[l]);
                const Complex base = p0[b][k] + std::conj(p0[b][l]);
                Complex kernel;
                if (steady) {
                    kernel = base / sum;
                } else {
                    const Complex both = std::exp(sum * t);
                    const Complex ek = std::exp(rates_[k] * t);
                    const Complex el = std::exp(std::conj(rates_[l]) * t);
                    kernel = ((both + 1.0) * base - ek * (tr.p[b][k] + tr.q[b][l]) -
                              el * (std::conj(tr.q[b][k]) + std::conj(tr.p[b][l]))) /
                             sum;
                }
                for (int i = 0; i < 4; ++i) {
                    for (int j = i; j < 4; ++j) {
                        out(i, j) += weight *
                                     (residues_[k](i, b) * std::conj(residues_[l](j, b)) * kernel).real();
                    }
                }
            }
        }
    }
    return out.selfadjointView<Eigen::Upper>();
}

Eigen::Matrix4d CovarianceEngine::lyapunov_steady() const {
    Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
    for (int b = 0; b < 2; ++b) {
        d(kMomentum[b], kMomentum[b]) = 2.0 * model_.mass[b] * model_.damping[b] * model_.theta[b];
    }
    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    Eigen::Matrix<double, 16, 16> op = Eigen::Matrix<double, 16, 16>::Zero();
    // vec(A X + X A^T) = (I kron A + A kron I) vec(X), column-major vec.
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            op.block<4, 4>(4 * i, 4 * j) = drift_(i, j) * id;
            if (i == j) {
                op.block<4, 4>(4 * i, 4 * j) += drift_;
            }
        }
    }
    const Eigen::Matrix<double, 16, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 16, 1>>(d.data());
    Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(op);
    if (!lu.isInvertible()) {
        throw SingularMatrixError("Lyapunov operator is singular");
    }
    const Eigen::Matrix<double, 16, 1> x = lu.solve(rhs);
    return symmetrize(Eigen::Map<const Eigen::Matrix4d>(x.data()));
}

Eigen::Matrix4d CovarianceEngine::reduced_classical_noise(double t) const {
    if (t == 0.0) {
        return Eigen::Matrix4d::Zero();
    }
    if (route_ == NoiseRoute::resolvent) {
        const Eigen::Matrix4d steady = lyapunov_steady();
        if (is_infinite(t)) {
            return steady;
        }
        const Eigen::Matrix4d phi = greens_.propagator(t, GreensPath::ode);
        return symmetrize(steady - phi * steady * phi.transpose());
    }
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    const bool steady = is_infinite(t);
    const std::size_t n = rates_.size();
    for (int b = 0; b < 2; ++b) {
        const double weight = 2.0 * model_.mass[b] * model_.damping[b] * model_.theta[b];
        if (weight == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
                const Complex sum = rates_[k] + std::conj(rates_[l]);
                const Complex kernel = steady ? -1.0 / sum : (std::exp(sum * t) - 1.0) / sum;
                for (int i = 0; i < 4; ++i) {
                    for (int j = i; j < 4; ++j) {
                        out(i, j) += weight *
                                     (residues_[k](i, b) * std::conj(residues_[l](j, b)) * kernel).real();
                    }
                }
            }
        }
    }
    return out.selfadjointView<Eigen::Upper>();
}

Eigen::Matrix4d CovarianceEngine::resolvent_noise(double t, const Eigen::Matrix4d& phi,
                                                  bool full_kernel) const {
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    if (t == 0.0) {
        return out;
    }
    const bool steady = is_infinite(t);
    const Eigen::Matrix4cd a = drift_.cast<Complex>();
    const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
    Eigen::Matrix<Complex, 4, 2> kicked;
    for (int b = 0; b < 2; ++b) {
        kicked.col(b) = phi.col(kMomentum[b]).cast<Complex>();
    }
    for (const auto& node : frequency_nodes(steady ? 0.0 : t)) {
        const double w = node.x;
        std::array<double, 2> dn{};
        for (int b = 0; b < 2; ++b) {
            const double nu = full_kernel ? reduced_quantum_spectrum(w, model_.theta[b], model_.zeta)
                                          : reduced_excess_spectrum(w, model_.theta[b], model_.zeta);
            dn[b] = node.weight * bath_weight(b) * nu;
        }
        if (dn[0] == 0.0 && dn[1] == 0.0) {
            continue;
        }
        const Eigen::Matrix4cd r = (a + Complex(0.0, w) * id).inverse();
        Eigen::Matrix<Complex, 4, 2> j;
        for (int b = 0; b < 2; ++b) {
            j.col(b) = -r.col(kMomentum[b]);
        }
        if (!steady) {
            j += std::polar(1.0, w * t) * (r * kicked);
        }
        for (int b = 0; b < 2; ++b) {
            for (int i = 0; i < 4; ++i) {
                for (int k = i; k < 4; ++k) {
                    out(i, k) += dn[b] * (j(i, b) * std::conj(j(k, b))).real();
                }
            }
        }
    }
    if (full_kernel) {
        // White-noise tail beyond omega_max at leading order in 1/omega.
        for (int b = 0; b < 2; ++b) {
            const double tail = bath_weight(b) * 2.0 * model_.theta[b] / omega_max_;
            for (int i = 0; i < 4; ++i) {
                for (int k = i; k < 4; ++k) {
                    const double direct = (i == kMomentum[b] && k == kMomentum[b]) ? 1.0 : 0.0;
                    const double carried = steady ? 0.0 : phi(i, kMomentum[b]) * phi(k, kMomentum[b]);
                    out(i, k) += tail * (direct + carried);
                }
            }
        }
    }
    return out.selfadjointView<Eigen::Upper>();
}

Eigen::Matrix4d CovarianceEngine::reduced_excess_noise(double t, NoiseRoute route) const {
    if (route == NoiseRoute::automatic) {
        route = route_;
    }
    if (t == 0.0 || model_.zeta == 0.0) {
        return Eigen::Matrix4d::Zero();
    }
    if (route == NoiseRoute::residues) {
        if (!greens_.residues_usable()) {
            throw DegenerateFormError("modal expansion is degenerate; use the resolvent route");
        }
        return is_infinite(t) ? excess_from_transforms(t, {}) : excess_from_transforms(t, excess_transforms(t));
    }
    const Eigen::Matrix4d phi = is_infinite(t) ? Eigen::Matrix4d::Zero().eval()
                                               : greens_.propagator(t, GreensPath::ode);
    return resolvent_noise(t, phi, false);
}

Eigen::Matrix4d CovarianceEngine::reduced_quantum_noise_direct(double t) const {
    const Eigen::Matrix4d phi = is_infinite(t) ? Eigen::Matrix4d::Zero().eval()
                                               : greens_.propagator(t, GreensPath::ode);
    return resolvent_noise(t, phi, true);
}

CovarianceMatrix CovarianceEngine::noise_covariance(double t, Mode mode) const {
    if (!(t >= 0.0)) {
        throw DomainError("time must be non-negative");
    }
    const double tr = is_infinite(t) ? t : t * model_.scales.frequency;
    Eigen::Matrix4d noise = reduced_classical_noise(tr);
    if (mode == Mode::quantum) {
        noise += reduced_excess_noise(tr, route_);
    }
    return CovarianceMatrix::from_matrix(symmetrize(model_.to_cgs(noise)));
}

CovarianceMatrix CovarianceEngine::classical_image(const CovarianceMatrix& initial) const {
    if (options_.classical_initial == ClassicalInitial::shared) {
        return initial;
    }
    return CovarianceMatrix::from_matrix(Eigen::Matrix4d::Zero());
}

void CovarianceEngine::check_initial(const CovarianceMatrix& initial, Mode mode) const {
    const auto report = validate_covariance(initial, mode, config_, options_.constants);
    if (!report.valid(1e-10)) {
        throw DomainError(mode == Mode::quantum
                              ? "initial covariance violates the uncertainty relation"
                              : "initial covariance is not positive semidefinite");
    }
}

Snapshot CovarianceEngine::assemble(double t, const Eigen::Matrix4d& phi,
                                    const Eigen::Matrix4d& sigma0,
                                    const Eigen::Matrix4d& sigma0_classical) const {
    const double tr = t * model_.scales.frequency;
    const Eigen::Matrix4d classical_noise = reduced_classical_noise(tr);
    const Eigen::Matrix4d excess_noise = reduced_excess_noise(tr, route_);
    const Eigen::Matrix4d quantum = phi * sigma0 * phi.transpose() + classical_noise + excess_noise;
    const Eigen::Matrix4d classical = phi * sigma0_classical * phi.transpose() + classical_noise;
    Snapshot s{t, CovarianceMatrix::from_matrix(symmetrize(model_.to_cgs(quantum))),
               CovarianceMatrix::from_matrix(symmetrize(model_.to_cgs(classical))), {}};
    s.excess = CovarianceMatrix::from_matrix(symmetrize(model_.to_cgs(quantum - classical)));
    return s;
}

CovarianceMatrix CovarianceEngine::covariance(const CovarianceMatrix& initial, double t, Mode mode) const {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and non-negative");
    }
    check_initial(initial, mode);
    const Eigen::Matrix4d start = model_.to_reduced(
        (mode == Mode::quantum ? initial : classical_image(initial)).matrix());
    const double tr = t * model_.scales.frequency;
    const Eigen::Matrix4d phi = greens_.propagator(tr);
    Eigen::Matrix4d sigma = phi * start * phi.transpose() + reduced_classical_noise(tr);
    if (mode == Mode::quantum) {
        sigma += reduced_excess_noise(tr, route_);
    }
    return CovarianceMatrix::from_matrix(symmetrize(model_.to_cgs(sigma)));
}

CovarianceMatrix CovarianceEngine::quantum_excess(const CovarianceMatrix& initial, double t) const {
    const double times[] = {t};
    return evolve(initial, times).front().excess;
}

CovarianceMatrix CovarianceEngine::steady_state_covariance(Mode mode) const {
    return noise_covariance(std::numeric_limits<double>::infinity(), mode);
}

CovarianceMatrix CovarianceEngine::steady_state_excess() const {
    const Eigen::Matrix4d excess = reduced_excess_noise(std::numeric_limits<double>::infinity(), route_);
    return CovarianceMatrix::from_matrix(symmetrize(model_.to_cgs(excess)));
}

double CovarianceEngine::fdt_variance(int oscillator, double temperature) const {
    if (oscillator < 0 || oscillator > 1) {
        throw DomainError("oscillator index must be 0 or 1");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw DomainError("FDT normalizer needs a positive finite temperature");
    }
    const auto& c = options_.constants;
    const double theta = c.kB * temperature / (c.hbar * model_.scales.frequency);
    const double zeta = model_.zeta;
    const int i = oscillator;
    const double m = model_.mass[i];
    const double w0 = model_.frequency[i];
    const double g = model_.damping[i];

    double classical = 0.0;
    std::vector<double> centers;
    std::function<double(double)> integrand;
    if (options_.fdt_reference == FdtReference::isolated) {
        classical = theta / (m * w0 * w0);
        centers.push_back(w0);
        integrand = [=](double w) {
            const double d = w0 * w0 - w * w;
            return (g / (kPi * m)) * reduced_excess_spectrum(w, theta, zeta) / (d * d + g * g * w * w);
        };
    } else {
        const double m1w1 = model_.mass[0] * model_.frequency[0] * model_.frequency[0];
        const double m2w2 = model_.mass[1] * model_.frequency[1] * model_.frequency[1];
        const double det0 = m1w1 * m2w2 - model_.coupling * model_.coupling;
        classical = theta * (i == 0 ? m2w2 : m1w1) / det0;
        for (const auto& pole : greens_.modes().poles()) {
            centers.push_back(std::abs(pole.rate.imag()));
        }
        const ReducedModel md = model_;
        integrand = [=](double w) {
            Eigen::Matrix2cd k;
            for (int a = 0; a < 2; ++a) {
                k(a, a) = md.mass[a] * Complex(md.frequency[a] * md.frequency[a] - w * w,
                                               -md.damping[a] * w);
            }
            k(0, 1) = k(1, 0) = md.coupling;
            const Complex det = k(0, 0) * k(1, 1) - k(0, 1) * k(1, 0);
            Eigen::Matrix2cd chi;
            chi << k(1, 1) / det, -k(0, 1) / det, -k(1, 0) / det, k(0, 0) / det;
            double sum = 0.0;
            for (int b = 0; b < 2; ++b) {
                sum += md.mass[b] * md.damping[b] * std::norm(chi(i, b));
            }
            return reduced_excess_spectrum(w, theta, zeta) * sum / kPi;
        };
    }
    if (zeta == 0.0) {
        return classical * model_.scales.length() * model_.scales.length();
    }
    std::vector<double> breaks;
    for (double center : centers) {
        for (double width : {1.0, 4.0, 16.0, 64.0}) {
            breaks.push_back(std::max(0.0, center - width * g));
            breaks.push_back(center + width * g);
        }
        breaks.push_back(center);
    }
    const double split = 2.0 * omega_max_;
    const double body = integrate_adaptive(integrand, 0.0, split, breaks, 1e-12, 1e-300);
    const double tail = integrate_to_infinity(integrand, split, 1e-10, 1e-300);
    return (classical + body + tail) * model_.scales.length() * model_.scales.length();
}

std::vector<Snapshot> CovarianceEngine::evolve(const CovarianceMatrix& initial,
                                               std::span<const double> times) const {
    check_initial(initial, Mode::quantum);
    std::vector<double> reduced(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || !std::isfinite(times[k])) {
            throw DomainError("times must be finite and non-negative");
        }
        if (k > 0 && times[k] < times[k - 1]) {
            throw DomainError("times must be non-decreasing");
        }
        reduced[k] = times[k] * model_.scales.frequency;
    }
    const auto responses = greens_.response_series(reduced);
    const Eigen::Matrix4d sigma0 = model_.to_reduced(initial.matrix());
    const Eigen::Matrix4d sigma0_classical = model_.to_reduced(classical_image(initial).matrix());
    std::vector<Snapshot> out(times.size());
    parallel_for(times.size(), options_.threads, [&](std::size_t k) {
        out[k] = assemble(times[k], greens_.propagator_from(responses[k]), sigma0, sigma0_classical);
    });
    return out;
}

ExcessSeries CovarianceEngine::normalized_excess_series(const CovarianceMatrix& initial,
                                                        std::span<const double> times) const {
    ExcessSeries series;
    series.normalizer1 = fdt_variance(0, config_.bath(0).temperature);
    series.normalizer2 = fdt_variance(1, config_.bath(1).temperature);
    const auto snapshots = evolve(initial, times);
    const double gamma = config_.osc1().damping;
    for (const auto& s : snapshots) {
        series.time_seconds.push_back(s.time);
        series.time_gamma.push_back(s.time * gamma);
        series.excess1.push_back(s.excess(0, 0));
        series.excess2.push_back(s.excess(2, 2));
        series.excess12.push_back(s.excess(0, 2));
    }
    return series;
}

double relative_difference(const ReducedModel& model, const CovarianceMatrix& value,
                           const CovarianceMatrix& reference) {
    const Eigen::Matrix4d a = model.to_reduced(value.matrix());
    const Eigen::Matrix4d b = model.to_reduced(reference.matrix());
    const double norm = b.norm();
    const double diff = (a - b).norm();
    if (norm == 0.0) {
        return diff;
    }
    return diff / norm;
}

} // namespace qexcess
