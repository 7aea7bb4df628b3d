#include "qexcess/model.hpp"

#include <cmath>
#include <sstream>

#include "qexcess/errors.hpp"

namespace qexcess {

void PhysicalConstants::validate() const {
    if (!(hbar > 0.0) || !(kB > 0.0)) {
        throw ConfigError("physical constants must be positive");
    }
    if (!(hbar_scale >= 0.0 && hbar_scale <= 1.0)) {
        throw ConfigError("hbar_scale must lie in [0, 1]");
    }
}

namespace {

void check_oscillator(const OscillatorParams& p, int label) {
    std::ostringstream where;
    where << "oscillator " << label << ": ";
    if (!(p.mass > 0.0) || !std::isfinite(p.mass)) {
        throw ConfigError(where.str() + "mass must be positive");
    }
    if (!(p.eigenfrequency > 0.0) || !std::isfinite(p.eigenfrequency)) {
        throw ConfigError(where.str() + "eigenfrequency must be positive");
    }
    if (!(p.damping > 0.0) || !std::isfinite(p.damping)) {
        throw ConfigError(where.str() + "damping must be positive");
    }
    if (!(p.damping < 2.0 * p.eigenfrequency)) {
        throw ConfigError(where.str() + "damping must be below 2*eigenfrequency (underdamped regime)");
    }
}

} // namespace

SystemConfig::SystemConfig(const OscillatorParams& osc1, const OscillatorParams& osc2,
                           const BathParams& bath1, const BathParams& bath2, double coupling)
    : osc_{osc1, osc2}, bath_{bath1, bath2}, coupling_(coupling) {
    check_oscillator(osc1, 1);
    check_oscillator(osc2, 2);
    for (int b = 0; b < 2; ++b) {
        if (!(bath_[b].temperature >= 0.0) || !std::isfinite(bath_[b].temperature)) {
            throw ConfigError("bath " + std::to_string(b + 1) + ": temperature must be >= 0 K");
        }
    }
    if (!std::isfinite(coupling)) {
        throw ConfigError("coupling must be finite");
    }
    const double normalized = normalized_coupling(*this);
    if (!(std::abs(normalized) < 1.0)) {
        std::ostringstream msg;
        msg << "stability invariant violated: |normalized coupling| = " << std::abs(normalized)
            << " must be < 1 (potential energy must stay positive definite)";
        throw ConfigError(msg.str());
    }
}

SystemConfig SystemConfig::reference_system(double normalized, double temperature1,
                                          double temperature2) {
    const OscillatorParams osc1{1e-23, 1e13, 0.01 * 1e13};
    const OscillatorParams osc2{1.1 * osc1.mass, 1.1 * osc1.eigenfrequency, osc1.damping};
    return SystemConfig(osc1, osc2, BathParams{temperature1}, BathParams{temperature2},
                        coupling_from_normalized(normalized, osc1, osc2));
}

SystemConfig SystemConfig::with_coupling(double coupling) const {
    return SystemConfig(osc_[0], osc_[1], bath_[0], bath_[1], coupling);
}

SystemConfig SystemConfig::with_normalized_coupling(double normalized) const {
    return with_coupling(coupling_from_normalized(normalized, osc_[0], osc_[1]));
}

SystemConfig SystemConfig::with_temperatures(double temperature1, double temperature2) const {
    return SystemConfig(osc_[0], osc_[1], BathParams{temperature1}, BathParams{temperature2},
                        coupling_);
}

SystemConfig SystemConfig::with_oscillator(int index, const OscillatorParams& params) const {
    auto osc = osc_;
    osc.at(index) = params;
    return SystemConfig(osc[0], osc[1], bath_[0], bath_[1], coupling_);
}

SystemConfig SystemConfig::swapped() const {
    return SystemConfig(osc_[1], osc_[0], bath_[1], bath_[0], coupling_);
}

double normalized_coupling(const SystemConfig& config) {
    const auto& a = config.osc1();
    const auto& b = config.osc2();
    return config.coupling() / (a.eigenfrequency * b.eigenfrequency * std::sqrt(a.mass * b.mass));
}

double coupling_from_normalized(double normalized, const OscillatorParams& osc1,
                                const OscillatorParams& osc2) {
    return normalized * osc1.eigenfrequency * osc2.eigenfrequency * std::sqrt(osc1.mass * osc2.mass);
}

CovarianceMatrix ground_state_covariance(const SystemConfig& config,
                                         const PhysicalConstants& constants) {
    constants.validate();
    const double hbar = constants.effective_hbar();
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 2; ++a) {
        const auto& osc = config.oscillator(a);
        m(2 * a, 2 * a) = hbar / (2.0 * osc.mass * osc.eigenfrequency);
        m(2 * a + 1, 2 * a + 1) = hbar * osc.mass * osc.eigenfrequency / 2.0;
    }
    return CovarianceMatrix::from_matrix(m);
}

double Scales::length() const { return std::sqrt(hbar / (mass * frequency)); }

double Scales::momentum() const { return std::sqrt(hbar * mass * frequency); }

Eigen::Vector4d Scales::phase_units() const {
    const double l = length();
    const double p = momentum();
    return {l, p, l, p};
}

ReducedModel ReducedModel::from(const SystemConfig& config, const PhysicalConstants& constants) {
    constants.validate();
    const auto& ref = config.osc1();
    ReducedModel r{};
    r.scales = Scales{ref.mass, ref.eigenfrequency, constants.hbar, constants.kB};
    for (int a = 0; a < 2; ++a) {
        const auto& osc = config.oscillator(a);
        r.mass[a] = osc.mass / ref.mass;
        r.frequency[a] = osc.eigenfrequency / ref.eigenfrequency;
        r.damping[a] = osc.damping / ref.eigenfrequency;
        r.theta[a] = constants.kB * config.bath(a).temperature / (constants.hbar * ref.eigenfrequency);
    }
    r.coupling = config.coupling() / (ref.mass * ref.eigenfrequency * ref.eigenfrequency);
    r.zeta = constants.hbar_scale;
    return r;
}

Eigen::Matrix4d ReducedModel::drift() const {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 2; ++i) {
        const int x = 2 * i;
        const int p = x + 1;
        const int other = 2 * (1 - i);
        a(x, p) = 1.0 / mass[i];
        a(p, x) = -mass[i] * frequency[i] * frequency[i];
        a(p, p) = -damping[i];
        a(p, other) = -coupling;
    }
    return a;
}

Eigen::Matrix4d ReducedModel::to_reduced(const Eigen::Matrix4d& cgs) const {
    const Eigen::Vector4d u = scales.phase_units().cwiseInverse();
    return u.asDiagonal() * cgs * u.asDiagonal();
}

Eigen::Matrix4d ReducedModel::to_cgs(const Eigen::Matrix4d& reduced) const {
    const Eigen::Vector4d u = scales.phase_units();
    return u.asDiagonal() * reduced * u.asDiagonal();
}

} // namespace qexcess
