#include "qexcess/bath.hpp"

#include <cmath>
#include <vector>

#include "qexcess/errors.hpp"
#include "qexcess/quadrature.hpp"

namespace qexcess {

double coth_stable(double x) {
    if (x < 1e-4) {
        return 1.0 / x + x / 3.0 - x * x * x / 45.0;
    }
    if (x > 20.0) {
        return 1.0;
    }
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

double excess_factor(double x) {
    if (x < 0.2) {
        // Bernoulli series of x coth x - 1.
        const double y = x * x;
        return y * (1.0 / 3.0
               + y * (-1.0 / 45.0
               + y * (2.0 / 945.0
               + y * (-1.0 / 4725.0
               + y * (2.0 / 93555.0
               + y * (-1382.0 / 638512875.0
               + y * (4.0 / 18243225.0)))))));
    }
    if (x > 20.0) {
        return x - 1.0;
    }
    return x - 1.0 + 2.0 * x / std::expm1(2.0 * x);
}

double reduced_excess_spectrum(double omega, double theta, double zeta) {
    const double w = std::abs(omega);
    if (zeta == 0.0) {
        return 0.0;
    }
    if (theta == 0.0) {
        return zeta * w;
    }
    return 2.0 * theta * excess_factor(zeta * w / (2.0 * theta));
}

double reduced_quantum_spectrum(double omega, double theta, double zeta) {
    return 2.0 * theta + reduced_excess_spectrum(omega, theta, zeta);
}

double kernel_value(const SpectralKernel& kernel, double omega, const PhysicalConstants& constants) {
    if (!(omega >= 0.0)) {
        throw DomainError("kernel_value: omega must be >= 0");
    }
    if (kernel.temperature < 0.0) {
        throw DomainError("kernel_value: temperature must be >= 0");
    }
    const double kt = constants.kB * kernel.temperature;
    if (kernel.mode == Mode::classical) {
        if (kernel.temperature == 0.0) {
            throw DomainError("kernel_value: classical white-noise weight vanishes at T = 0");
        }
        return 2.0 * kt;
    }
    const double quantum = kernel.hbar_scale * constants.hbar * omega;
    if (kernel.temperature == 0.0) {
        return quantum;
    }
    if (quantum == 0.0) {
        return 2.0 * kt;
    }
    const double x = quantum / (2.0 * kt);
    return quantum * coth_stable(x);
}

RegimeReport regime(double temperature, double omega0, const PhysicalConstants& constants) {
    if (!(temperature >= 0.0) || !(omega0 > 0.0)) {
        throw DomainError("regime: need T >= 0 and omega0 > 0");
    }
    const double ratio = constants.kB * temperature / (constants.hbar * omega0);
    return {ratio, ratio >= 0.5 ? Regime::high : Regime::low};
}

double correlation_function(const SpectralKernel& kernel, double gamma, double mass, double tau,
                            std::optional<double> cutoff, const PhysicalConstants& constants) {
    if (kernel.mode == Mode::classical) {
        return 2.0 * mass * gamma * constants.kB * kernel.temperature;
    }
    if (!cutoff || !(*cutoff > 0.0)) {
        throw DomainError("correlation_function: quantum kernel needs a positive frequency cutoff");
    }
    const double wc = *cutoff;
    auto integrand = [&](double w) { return kernel_value(kernel, w, constants) * std::cos(w * tau); };
    // Panels no wider than a quarter period of cos(w tau).
    std::vector<double> breaks;
    const double at = std::abs(tau);
    if (at > 0.0) {
        const double step = 0.5 * kPi / at;
        for (double w = step; w < wc; w += step) {
            breaks.push_back(w);
        }
    }
    const double integral = integrate_adaptive(integrand, 0.0, wc, breaks, 1e-10, 0.0);
    return mass * gamma / kPi * integral;
}

} // namespace qexcess
