#include "qexcess/covariance_matrix.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qexcess/model.hpp"

namespace qexcess {

int CovarianceMatrix::index(int i, int j) {
    if (i < 0 || j < 0 || i >= kDim || j >= kDim) {
        throw std::out_of_range("covariance index out of range");
    }
    if (i > j) {
        std::swap(i, j);
    }
    // Row-major upper triangle: row i starts after sum_{r<i} (4 - r) entries.
    return i * kDim - i * (i - 1) / 2 + (j - i);
}

CovarianceMatrix CovarianceMatrix::from_matrix(const Eigen::Matrix4d& m) {
    std::array<double, kIndependent> upper{};
    for (int i = 0; i < kDim; ++i) {
        for (int j = i; j < kDim; ++j) {
            upper[index(i, j)] = m(i, j);
        }
    }
    return CovarianceMatrix(upper);
}

Eigen::Matrix4d CovarianceMatrix::matrix() const {
    Eigen::Matrix4d m;
    for (int i = 0; i < kDim; ++i) {
        for (int j = 0; j < kDim; ++j) {
            m(i, j) = (*this)(i, j);
        }
    }
    return m;
}

const std::array<std::string_view, CovarianceMatrix::kIndependent>&
CovarianceMatrix::element_names() {
    static const std::array<std::string_view, kIndependent> names{
        "x1x1", "x1p1", "x1x2", "x1p2", "p1p1", "p1x2", "p1p2", "x2x2", "x2p2", "p2p2"};
    return names;
}

CovarianceMatrix CovarianceMatrix::operator+(const CovarianceMatrix& other) const {
    auto out = upper_;
    for (int k = 0; k < kIndependent; ++k) {
        out[k] += other.upper_[k];
    }
    return CovarianceMatrix(out);
}

CovarianceMatrix CovarianceMatrix::operator-(const CovarianceMatrix& other) const {
    auto out = upper_;
    for (int k = 0; k < kIndependent; ++k) {
        out[k] -= other.upper_[k];
    }
    return CovarianceMatrix(out);
}

MarginReport validate_covariance(const CovarianceMatrix& sigma, Mode mode,
                                 const SystemConfig& config,
                                 const PhysicalConstants& constants) {
    constants.validate();
    // Per-oscillator hbar-balanced coordinates: the symplectic form keeps
    // unit weight, so the quantum term becomes (i zeta / 2) Omega.
    Eigen::Vector4d inv_units;
    for (int a = 0; a < 2; ++a) {
        const auto& osc = config.oscillator(a);
        inv_units(2 * a) = 1.0 / std::sqrt(constants.hbar / (osc.mass * osc.eigenfrequency));
        inv_units(2 * a + 1) = 1.0 / std::sqrt(constants.hbar * osc.mass * osc.eigenfrequency);
    }
    const Eigen::Matrix4d scaled = inv_units.asDiagonal() * sigma.matrix() * inv_units.asDiagonal();

    MarginReport report;
    report.scale = scaled.norm() * constants.hbar;
    if (mode == Mode::classical) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(scaled, Eigen::EigenvaluesOnly);
        report.margin = solver.eigenvalues().minCoeff() * constants.hbar;
        return report;
    }
    Eigen::Matrix4cd h = scaled.cast<std::complex<double>>();
    const std::complex<double> half_i(0.0, 0.5 * constants.hbar_scale);
    for (int a = 0; a < 2; ++a) {
        h(2 * a, 2 * a + 1) += half_i;
        h(2 * a + 1, 2 * a) -= half_i;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h, Eigen::EigenvaluesOnly);
    report.margin = solver.eigenvalues().minCoeff() * constants.hbar;
    return report;
}

} // namespace qexcess
