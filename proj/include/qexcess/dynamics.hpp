// dynamics.hpp: transient and steady covariance of the coupled pair and its quantum excess
//
// The noise part of the covariance is
//
//   Sigma_ij(t) = sum_b (M_b gamma_b / pi) int_0^inf dw nu_b(w) Re[J_ib(w,t) conj(J_jb(w,t))]
//
// with J the finite-time Fourier transform of the response to a momentum
// kick on oscillator b. The classical kernel nu = 2 kB T is white, and the
// integral is evaluated exactly by closing the contour over the poles of the
// modal expansion. The quantum kernel is split as classical + (nu_q - nu_cl);
// the second term is integrated numerically up to omega_max, after reducing
// every product of windowed transforms to eight one-dimensional Fourier
// integrals per bath.

#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qexcess/covariance_matrix.hpp"
#include "qexcess/greens.hpp"
#include "qexcess/model.hpp"
#include "qexcess/quadrature.hpp"

namespace qexcess {

/// Coefficients of the reduced coordinate distribution
/// exp(-(beta11 x1^2 - 2 beta12 x1 x2 + beta22 x2^2) / 2).
struct BetaForm {
    double b11;
    double b12;
    double b22;
};

struct CoordinateMoments {
    double x1x1;
    double x2x2;
    double x1x2;
};

/// x1^2 = b22 / d, x2^2 = b11 / d, x1x2 = b12 / d with d = b11 b22 - b12^2.
/// Throws DegenerateFormError unless b11 > 0, b22 > 0 and d > 0.
CoordinateMoments beta_to_covariance(const BetaForm& beta);
/// Inverse of beta_to_covariance.
BetaForm covariance_to_beta(const CoordinateMoments& moments);

/// Initial state of the classical run: the hbar -> 0 image of the ground
/// state (zero), or the same matrix as the quantum run.
enum class ClassicalInitial { zero, shared };

/// Susceptibility used for the FDT normalizer: the isolated damped
/// oscillator, or the diagonal element of the coupled pair.
enum class FdtReference { isolated, coupled };

/// residues: modal expansion (default). resolvent: direct quadrature with
/// J = (A + i w)^-1 (e^{i w t} Phi(t) - 1), used as oracle and as fallback
/// when the modal expansion is degenerate.
enum class NoiseRoute { automatic, residues, resolvent };

struct EngineOptions {
    PhysicalConstants constants{};
    double omega_max_factor = 50.0;  // omega_max = factor * max(w01, w02)
    ClassicalInitial classical_initial = ClassicalInitial::zero;
    FdtReference fdt_reference = FdtReference::isolated;
    NoiseRoute route = NoiseRoute::automatic;
    unsigned threads = 1;
};

struct Snapshot {
    double time;  // s
    CovarianceMatrix quantum;
    CovarianceMatrix classical;
    CovarianceMatrix excess;
};

struct ExcessSeries {
    std::vector<double> time_seconds;
    std::vector<double> time_gamma;  // t * gamma_1
    std::vector<double> excess1;     // cm^2, Delta^q_11
    std::vector<double> excess2;     // cm^2, Delta^q_22
    std::vector<double> excess12;    // cm^2, Delta^q_12
    double normalizer1 = 0.0;        // sigma_1^2(FDT), cm^2
    double normalizer2 = 0.0;

    std::size_t size() const { return time_seconds.size(); }
    double normalized1(std::size_t k) const { return excess1[k] / normalizer1; }
    double normalized2(std::size_t k) const { return excess2[k] / normalizer2; }
    double normalized12(std::size_t k) const;
};

class CovarianceEngine {
public:
    explicit CovarianceEngine(const SystemConfig& config, const EngineOptions& options = {});

    const SystemConfig& config() const { return config_; }
    const EngineOptions& options() const { return options_; }
    const ReducedModel& model() const { return model_; }
    const GreensFunction& greens() const { return greens_; }
    /// Route actually used (automatic resolves to residues unless degenerate).
    NoiseRoute route() const { return route_; }
    double omega_max() const { return omega_max_; }  // reduced units

    /// Noise-driven part of the covariance accumulated from t = 0 (CGS, t in s).
    /// t = +infinity gives the stationary value.
    CovarianceMatrix noise_covariance(double t, Mode mode) const;

    /// Phi sigma0 Phi^T + noise. The classical run starts from the image of
    /// sigma0 selected by EngineOptions::classical_initial.
    CovarianceMatrix covariance(const CovarianceMatrix& initial, double t, Mode mode) const;

    /// covariance(quantum) - covariance(classical).
    CovarianceMatrix quantum_excess(const CovarianceMatrix& initial, double t) const;

    CovarianceMatrix steady_state_covariance(Mode mode) const;
    CovarianceMatrix steady_state_excess() const;

    /// sigma_i^2(FDT) at temperature T > 0 for oscillator i in {0, 1}, cm^2.
    double fdt_variance(int oscillator, double temperature) const;

    /// All three covariances on a non-decreasing grid of times in seconds.
    std::vector<Snapshot> evolve(const CovarianceMatrix& initial, std::span<const double> times) const;

    /// Delta^q on the grid, with FDT normalizers at each bath temperature.
    ExcessSeries normalized_excess_series(const CovarianceMatrix& initial,
                                          std::span<const double> times) const;

    CovarianceMatrix classical_image(const CovarianceMatrix& initial) const;

    // Engine-unit internals, exposed for the oracle checks.

    Eigen::Matrix4d reduced_classical_noise(double t) const;
    Eigen::Matrix4d reduced_excess_noise(double t, NoiseRoute route) const;
    /// Resolvent-route quadrature of the full quantum kernel nu_q (not split
    /// into classical + excess). Independent of the modal expansion.
    Eigen::Matrix4d reduced_quantum_noise_direct(double t) const;

private:
    struct Transforms {
        std::array<std::array<Complex, 4>, 2> p;
        std::array<std::array<Complex, 4>, 2> q;
    };

    Transforms excess_transforms(double t) const;
    Eigen::Matrix4d excess_from_transforms(double t, const Transforms& tr) const;
    Eigen::Matrix4d resolvent_noise(double t, const Eigen::Matrix4d& phi, bool full_kernel) const;
    Eigen::Matrix4d lyapunov_steady() const;
    std::vector<QuadratureNode> frequency_nodes(double t) const;
    double bath_weight(int b) const;
    void check_initial(const CovarianceMatrix& initial, Mode mode) const;
    Snapshot assemble(double t, const Eigen::Matrix4d& phi, const Eigen::Matrix4d& sigma0,
                      const Eigen::Matrix4d& sigma0_classical) const;

    SystemConfig config_;
    EngineOptions options_;
    ReducedModel model_;
    GreensFunction greens_;
    NoiseRoute route_;
    double omega_max_;
    Eigen::Matrix4d drift_;
    std::vector<Complex> rates_;
    std::vector<Eigen::Matrix<Complex, 4, 2>> residues_;
    Transforms transforms_at_zero_{};
};

/// Oracle for the classical limit: integrates
/// d sigma/dt = A sigma + sigma A^T + D, D = diag(0, 2 M1 gamma1 kB T1, 0, 2 M2 gamma2 kB T2),
/// with adaptive Runge-Kutta-Fehlberg 7(8) at relative tolerance 1e-10.
/// Returns the covariance at each (non-decreasing) time in seconds.
std::vector<CovarianceMatrix> classical_covariance_lyapunov(const SystemConfig& config,
                                                            const CovarianceMatrix& initial,
                                                            std::span<const double> times);

CovarianceMatrix classical_covariance_lyapunov(const SystemConfig& config,
                                               const CovarianceMatrix& initial, double t);

/// Frobenius norm of the difference over the norm of the reference, both in
/// engine units so position and momentum entries are commensurate.
double relative_difference(const ReducedModel& model, const CovarianceMatrix& value,
                           const CovarianceMatrix& reference);

} // namespace qexcess
