// quadrature.hpp: adaptive Gauss-Kronrod integration and graded Gauss-Legendre panels

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "qexcess/errors.hpp"

namespace qexcess {

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.cwiseAbs().maxCoeff();
}

// 15-point Kronrod extension of the 7-point Gauss rule, nodes on [0, 1] (symmetric).
inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Value>
struct Segment {
    double lo;
    double hi;
    Value value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class Value, class F>
Segment<Value> kronrod_segment(F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Value fc = f(center);
    Value kronrod = kKronrodWeights[7] * fc;
    Value gauss = kGaussWeights[3] * fc;
    for (int k = 0; k < 7; ++k) {
        const double dx = half * kKronrodNodes[k];
        Value pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + kKronrodWeights[k] * pair;
        if (k % 2 == 1) {
            gauss = gauss + kGaussWeights[k / 2] * pair;
        }
    }
    Value value = half * kronrod;
    Value diff = half * (kronrod - gauss);
    return {lo, hi, value, magnitude(diff)};
}

} // namespace detail

/// Globally adaptive G7-K15 integration of f over [a, b], starting from the
/// given interior breakpoints. Stops when the summed error estimate is below
/// max(atol, rtol * |I|); throws QuadratureError after max_segments.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, std::span<const double> breakpoints,
                        double rtol, double atol, int max_segments = 200000) {
    using Value = std::decay_t<decltype(f(a))>;
    std::vector<double> cuts{a};
    for (double x : breakpoints) {
        if (x > a && x < b) {
            cuts.push_back(x);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<detail::Segment<Value>> queue;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) {
            queue.push(detail::kronrod_segment<Value>(f, cuts[i], cuts[i + 1]));
        }
    }
    auto totals = [&queue]() {
        auto copy = queue;
        Value sum = copy.top().value;
        double err = copy.top().error;
        copy.pop();
        while (!copy.empty()) {
            sum = sum + copy.top().value;
            err += copy.top().error;
            copy.pop();
        }
        return std::pair<Value, double>{sum, err};
    };
    int segments = static_cast<int>(queue.size());
    // Refine in batches so the O(n) re-summation stays amortized.
    while (true) {
        auto [sum, err] = totals();
        const double target = std::max(atol, rtol * detail::magnitude(sum));
        if (err <= target) {
            return sum;
        }
        if (segments >= max_segments) {
            throw QuadratureError("adaptive quadrature did not reach tolerance");
        }
        const int batch = std::max(1, segments / 8);
        for (int k = 0; k < batch && !queue.empty(); ++k) {
            auto worst = queue.top();
            queue.pop();
            const double mid = 0.5 * (worst.lo + worst.hi);
            if (!(mid > worst.lo && mid < worst.hi)) {
                throw QuadratureError("adaptive quadrature hit floating-point resolution");
            }
            queue.push(detail::kronrod_segment<Value>(f, worst.lo, mid));
            queue.push(detail::kronrod_segment<Value>(f, mid, worst.hi));
            ++segments;
        }
    }
}

/// int_a^inf f via w = a / u; the integrand must decay faster than 1/w.
template <class F>
auto integrate_to_infinity(F&& f, double a, double rtol, double atol) {
    if (!(a > 0.0)) {
        throw QuadratureError("integrate_to_infinity needs a positive lower limit");
    }
    auto mapped = [&](double u) { return (a / (u * u)) * f(a / u); };
    return integrate_adaptive(mapped, 0.0, 1.0, std::span<const double>{}, rtol, atol);
}

struct Panel {
    double lo;
    double hi;
};

/// Complex-plane features that limit panel width on the real frequency axis.
struct PanelSpec {
    double lower = 0.0;
    double upper = 1.0;
    std::vector<double> breakpoints;
    /// Integrand poles at (center, +-distance) off the real axis.
    std::vector<std::pair<double, double>> poles;
    /// Singularities at +-i*distance above the origin (thermal Matsubara poles).
    std::vector<double> origin_poles;
    /// Panel width is capped at 4 pi / t so each panel spans at most two periods of e^{i w t}.
    double oscillation_time = 0.0;
    double max_width = 1.0;
};

std::vector<Panel> build_panels(const PanelSpec& spec);

struct QuadratureNode {
    double x;
    double weight;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int order);

/// Maps an `order`-point Gauss-Legendre rule onto every panel.
std::vector<QuadratureNode> panel_nodes(const std::vector<Panel>& panels, int order);

} // namespace qexcess
