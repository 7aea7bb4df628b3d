// bath.hpp: Ohmic bath noise spectra in quantum and classical form

#pragma once

#include <optional>

#include "qexcess/constants.hpp"
#include "qexcess/covariance_matrix.hpp"

namespace qexcess {

struct SpectralKernel {
    Mode mode = Mode::quantum;
    double temperature = 0.0;  // K
    double hbar_scale = 1.0;
};

/// Spectral weight in erg.
///   quantum:   zeta hbar w coth(zeta hbar w / 2 kB T)   (zeta hbar w at T = 0)
///   classical: 2 kB T
/// Throws DomainError for omega < 0 or for the classical kernel at T = 0.
double kernel_value(const SpectralKernel& kernel, double omega,
                    const PhysicalConstants& constants = {});

enum class Regime { high, low };

struct RegimeReport {
    double ratio;  // kB T / (hbar w0)
    Regime label;  // high when ratio >= 1/2
};

RegimeReport regime(double temperature, double omega0, const PhysicalConstants& constants = {});

/// Symmetrized force autocorrelation (M gamma / pi) int_0^cutoff nu(w) cos(w tau) dw.
/// The classical kernel is white, so the classical branch returns its delta
/// strength 2 M gamma kB T regardless of tau. The quantum branch needs a
/// frequency cutoff (the Ohmic integral diverges at tau = 0) and throws
/// DomainError without one.
double correlation_function(const SpectralKernel& kernel, double gamma, double mass, double tau,
                            std::optional<double> cutoff,
                            const PhysicalConstants& constants = {});

// Dimensionless helpers shared with the engine.

/// coth(x) for x > 0, stable at both ends.
double coth_stable(double x);

/// x coth(x) - 1, accurate for small x.
double excess_factor(double x);

/// Quantum minus classical kernel in units of hbar w01, for reduced frequency
/// w, reduced temperature theta = kB T / (hbar w01) and hbar scale zeta.
double reduced_excess_spectrum(double omega, double theta, double zeta);

/// Full quantum kernel in the same units.
double reduced_quantum_spectrum(double omega, double theta, double zeta);

} // namespace qexcess
