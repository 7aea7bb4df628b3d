// model.hpp: physical description of two coupled damped oscillators in separate baths

#pragma once

#include <array>

#include <Eigen/Dense>

#include "qexcess/constants.hpp"
#include "qexcess/covariance_matrix.hpp"

namespace qexcess {

struct OscillatorParams {
    double mass = 0.0;            // g
    double eigenfrequency = 0.0;  // rad/s
    double damping = 0.0;         // rad/s (Ohmic friction rate)

    bool operator==(const OscillatorParams&) const = default;
};

struct BathParams {
    double temperature = 0.0;  // K

    bool operator==(const BathParams&) const = default;
};

/// Two oscillators with bilinear coordinate coupling `coupling * x1 * x2`,
/// each attached to its own Ohmic bath. All quantities are CGS.
///
/// Construction validates every invariant: positive masses, frequencies and
/// damping rates, underdamped oscillators (damping < 2 eigenfrequency),
/// non-negative temperatures and a positive-definite potential
/// (|normalized coupling| < 1). Instances are immutable.
class SystemConfig {
public:
    SystemConfig(const OscillatorParams& osc1, const OscillatorParams& osc2,
                 const BathParams& bath1, const BathParams& bath2, double coupling);

    /// M1 = 1e-23 g, w01 = 1e13 rad/s, M2 = 1.1 M1, w02 = 1.1 w01, gamma = 0.01 w01 for both baths.
    static SystemConfig reference_system(double normalized_coupling = 0.01,
                                       double temperature1 = 300.0,
                                       double temperature2 = 300.0);

    const OscillatorParams& oscillator(int index) const { return osc_.at(index); }
    const BathParams& bath(int index) const { return bath_.at(index); }
    const OscillatorParams& osc1() const { return osc_[0]; }
    const OscillatorParams& osc2() const { return osc_[1]; }
    double coupling() const { return coupling_; }

    SystemConfig with_coupling(double coupling) const;
    SystemConfig with_normalized_coupling(double normalized) const;
    SystemConfig with_temperatures(double temperature1, double temperature2) const;
    SystemConfig with_oscillator(int index, const OscillatorParams& params) const;
    /// Relabels oscillator 1 <-> 2 (and their baths).
    SystemConfig swapped() const;

    bool operator==(const SystemConfig&) const = default;

private:
    std::array<OscillatorParams, 2> osc_;
    std::array<BathParams, 2> bath_;
    double coupling_;
};

double normalized_coupling(const SystemConfig& config);
double coupling_from_normalized(double normalized, const OscillatorParams& osc1,
                                const OscillatorParams& osc2);

/// Factorized product of the isolated oscillators' ground states.
CovarianceMatrix ground_state_covariance(const SystemConfig& config,
                                         const PhysicalConstants& constants = {});

/// Unit system used by the numerical engine: mass M1, frequency w01, action hbar
/// (the unscaled one, so hbar_scale -> 0 stays finite).
struct Scales {
    double mass;
    double frequency;
    double hbar;
    double kB;

    double length() const;
    double momentum() const;
    double time() const { return 1.0 / frequency; }
    /// Conversion factors for the phase vector (x1, p1, x2, p2).
    Eigen::Vector4d phase_units() const;
};

/// The system expressed in engine units.
struct ReducedModel {
    std::array<double, 2> mass;
    std::array<double, 2> frequency;
    std::array<double, 2> damping;
    std::array<double, 2> theta;  // kB T / (hbar w01)
    double coupling;
    double zeta;                  // hbar_scale
    Scales scales;

    static ReducedModel from(const SystemConfig& config, const PhysicalConstants& constants = {});

    /// Drift matrix A of d/dt (x1, p1, x2, p2) = A (x1, p1, x2, p2).
    Eigen::Matrix4d drift() const;

    Eigen::Matrix4d to_reduced(const Eigen::Matrix4d& cgs) const;
    Eigen::Matrix4d to_cgs(const Eigen::Matrix4d& reduced) const;
};

} // namespace qexcess
