// validation.hpp: cross-checks of the engine against its independent oracle paths
#pragma once

#include <string>
#include <vector>

#include "qexcess/dynamics.hpp"

namespace qexcess {

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Residue vs ODE impulse response on `points` times over [0, span/gamma1];
/// metric is the largest ||W_res - W_ode|| / ||W_ode|| with W = (G; M dG/dt).
CheckResult check_greens_dual_path(const SystemConfig& config, int points = 50, double span_gamma = 20.0,
                                   double tolerance = 1e-6);

/// Closed-form classical covariance vs the Lyapunov ODE (zero initial state).
CheckResult check_classical_oracle(const SystemConfig& config, const EngineOptions& options = {},
                                   int points = 50, double span_gamma = 30.0, double tolerance = 1e-4);

/// Stationary closed form vs the ground-state transient at 50/gamma1.
CheckResult check_steady_limit(const SystemConfig& config, const EngineOptions& options = {},
                               double tolerance = 1e-4);

/// Quantum excess by modal residues vs direct resolvent quadrature, at 5/gamma1 and stationary.
CheckResult check_noise_routes(const SystemConfig& config, const EngineOptions& options = {},
                               double tolerance = 1e-6);

/// Quantum covariance computed with the unsplit kernel at each hbar scale,
/// extrapolated to zero by polynomial interpolation in zeta^2, vs the
/// closed-form classical covariance. Worst case over `times_gamma`.
CheckResult check_zeta_extrapolation(const SystemConfig& config, const EngineOptions& options = {},
                                     const std::vector<double>& times_gamma = {5.0, 30.0},
                                     const std::vector<double>& zetas = {0.2, 0.1, 0.05},
                                     double tolerance = 1e-3);

/// Stationary quantum covariance satisfies the uncertainty relation and the
/// classical covariance is positive semidefinite on `points` times over [0, 30/gamma1].
CheckResult check_physicality(const SystemConfig& config, const EngineOptions& options = {},
                              int points = 50, double tolerance = 1e-10);

/// Value at x = 0 of the polynomial through (x_k, y_k) (Neville's scheme).
Eigen::Matrix4d extrapolate_to_zero(const std::vector<double>& x, const std::vector<Eigen::Matrix4d>& y);

std::vector<CheckResult> run_validation_suite(const SystemConfig& config, const EngineOptions& options = {});

} // namespace qexcess
