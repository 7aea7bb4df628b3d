// greens.hpp: response functions of the coupled damped pair
//
// Two independent evaluation paths are provided for the impulse response:
// a partial-fraction expansion over the four roots of the characteristic
// quartic (default) and direct adaptive integration of the equations of
// motion (oracle). Everything except the free CGS functions works in the
// engine units of ReducedModel.

#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qexcess/model.hpp"

namespace qexcess {

using Complex = std::complex<double>;
using TransferMatrix = Eigen::Matrix2cd;

/// K(w) with K_aa = M_a (w0a^2 - w^2 - i gamma_a w), K_12 = K_21 = coupling.
TransferMatrix transfer_matrix(const SystemConfig& config, double omega);

/// chi(w) = K(w)^-1. Throws SingularMatrixError when |det K| < 1e-14 ||K||^2.
Eigen::Matrix2cd susceptibility(const SystemConfig& config, double omega);

enum class GreensPath { residues, ode };

struct ImpulseResponse {
    Eigen::Matrix2d position;  // G(t)
    Eigen::Matrix2d velocity;  // dG/dt
};

/// Roots of s^4 + c[3] s^3 + c[2] s^2 + c[1] s + c[0]: companion-matrix
/// eigenvalues polished by Newton iteration. Sorted by (imag, real).
/// Throws RootFindingError if a root's residual stays above 1e-12 relative.
std::array<Complex, 4> quartic_roots(const std::array<double, 4>& c);

struct Pole {
    Complex rate;               // s_k, Re s_k < 0
    Eigen::Matrix2cd residue;   // c_k with G(t) = sum_k c_k exp(s_k t)
};

class ModalExpansion {
public:
    explicit ModalExpansion(const ReducedModel& model);

    std::span<const Pole> poles() const { return poles_; }

    /// True when two poles of the coupled quartic are closer than 1e-6 |s|;
    /// partial fractions are then ill-conditioned. Never true for zero
    /// coupling, which is expanded oscillator by oscillator.
    bool degenerate() const { return degenerate_; }

    ImpulseResponse evaluate(double t) const;

    /// Residue of the phase-space response to unit momentum kicks: rows
    /// (x1, p1, x2, p2), columns kicked oscillator b. Position rows hold
    /// c_k(a, b); momentum rows M_a s_k c_k(a, b).
    Eigen::Matrix<Complex, 4, 2> phase_residue(std::size_t k) const;

    /// Slowest decay rate min_k |Re s_k|.
    double decay_rate() const;

private:
    std::vector<Pole> poles_;
    std::array<double, 2> mass_;
    bool degenerate_ = false;
};

class GreensFunction {
public:
    explicit GreensFunction(const ReducedModel& model);

    const ReducedModel& model() const { return model_; }
    const ModalExpansion& modes() const { return modes_; }
    bool residues_usable() const { return !modes_.degenerate(); }

    /// The residue path falls back to the ODE path when the poles are degenerate.
    ImpulseResponse response(double t, GreensPath path = GreensPath::residues) const;
    /// `times` must be non-decreasing and non-negative.
    std::vector<ImpulseResponse> response_series(std::span<const double> times,
                                                 GreensPath path = GreensPath::residues) const;

    /// Phi(t): column b is the phase-space solution started from unit
    /// initial condition in coordinate b.
    Eigen::Matrix4d propagator(double t, GreensPath path = GreensPath::residues) const;
    Eigen::Matrix4d propagator_from(const ImpulseResponse& r) const;

    /// Columns of Phi for the momentum kicks: (G; M dG/dt) stacked per oscillator.
    Eigen::Matrix<double, 4, 2> kick_response(const ImpulseResponse& r) const;

private:
    std::vector<ImpulseResponse> integrate_ode(std::span<const double> times) const;

    ReducedModel model_;
    ModalExpansion modes_;
};

/// CGS impulse response: G in s/g, dG/dt in 1/g.
ImpulseResponse impulse_response(const SystemConfig& config, double t,
                                 GreensPath path = GreensPath::residues);

/// CGS phase-space propagator over (x1, p1, x2, p2).
Eigen::Matrix4d propagator(const SystemConfig& config, double t,
                           GreensPath path = GreensPath::residues);

} // namespace qexcess
