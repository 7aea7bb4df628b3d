#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

#include "qexcess/constants.hpp"

namespace qexcess {

class SystemConfig;

enum class Mode { quantum, classical };

/// Symmetric 4x4 second-moment matrix over (x1, p1, x2, p2).
/// Only the upper triangle is stored; positivity is checked by
/// validate_covariance, not enforced here, so the same type also carries
/// differences such as the quantum excess.
class CovarianceMatrix {
public:
    static constexpr int kDim = 4;
    static constexpr int kIndependent = 10;

    CovarianceMatrix() { upper_.fill(0.0); }
    explicit CovarianceMatrix(const std::array<double, kIndependent>& upper) : upper_(upper) {}

    /// Takes the upper triangle of `m`; the lower triangle is ignored.
    static CovarianceMatrix from_matrix(const Eigen::Matrix4d& m);

    double operator()(int i, int j) const { return upper_[index(i, j)]; }
    const std::array<double, kIndependent>& upper() const { return upper_; }
    Eigen::Matrix4d matrix() const;

    /// Column labels in storage order: x1x1, x1p1, x1x2, x1p2, p1p1, ...
    static const std::array<std::string_view, kIndependent>& element_names();
    static int index(int i, int j);

    CovarianceMatrix operator+(const CovarianceMatrix& other) const;
    CovarianceMatrix operator-(const CovarianceMatrix& other) const;
    bool operator==(const CovarianceMatrix&) const = default;

private:
    std::array<double, kIndependent> upper_;
};

struct MarginReport {
    double margin = 0.0;  // erg s; smallest eigenvalue in hbar-balanced coordinates
    double scale = 0.0;   // erg s; Frobenius norm of the matrix in the same coordinates

    bool valid(double relative_tolerance = 1e-12) const {
        return margin >= -relative_tolerance * scale;
    }
};

/// Classical mode: smallest eigenvalue of sigma. Quantum mode: smallest
/// eigenvalue of sigma + (i hbar / 2) Omega. Both are evaluated after the
/// symplectic rescaling x -> x / sqrt(hbar / M w0), p -> p / sqrt(hbar M w0),
/// and reported back in units of hbar, so sigma = 0 gives -hbar_eff / 2.
MarginReport validate_covariance(const CovarianceMatrix& sigma, Mode mode,
                                 const SystemConfig& config,
                                 const PhysicalConstants& constants = {});

} // namespace qexcess
