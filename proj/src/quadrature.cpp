#include "qexcess/quadrature.hpp"

#include <map>
#include <mutex>

#include "qexcess/constants.hpp"

namespace qexcess {

namespace {

constexpr double kPoleFactor = 2.0;

double width_limit(const PanelSpec& spec, double lo, double hi) {
    double limit = spec.max_width;
    for (const auto& [center, distance] : spec.poles) {
        double gap = 0.0;
        if (center < lo) {
            gap = lo - center;
        } else if (center > hi) {
            gap = center - hi;
        }
        limit = std::min(limit, kPoleFactor * std::max(distance, gap));
    }
    for (double distance : spec.origin_poles) {
        limit = std::min(limit, kPoleFactor * std::max(distance, lo));
    }
    if (spec.oscillation_time > 0.0) {
        limit = std::min(limit, 4.0 * kPi / spec.oscillation_time);
    }
    return limit;
}

} // namespace

std::vector<Panel> build_panels(const PanelSpec& spec) {
    if (!(spec.upper > spec.lower)) {
        throw QuadratureError("build_panels: empty interval");
    }
    std::vector<double> cuts{spec.lower};
    for (double x : spec.breakpoints) {
        if (x > spec.lower && x < spec.upper) {
            cuts.push_back(x);
        }
    }
    cuts.push_back(spec.upper);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> out;
    std::vector<Panel> stack;
    for (std::size_t i = cuts.size() - 1; i > 0; --i) {
        stack.push_back({cuts[i - 1], cuts[i]});
    }
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double width = p.hi - p.lo;
        const double limit = width_limit(spec, p.lo, p.hi);
        if (width <= limit) {
            out.push_back(p);
            continue;
        }
        // Bisection keeps the grading toward poles geometric.
        const double mid = 0.5 * (p.lo + p.hi);
        stack.push_back({mid, p.hi});
        stack.push_back({p.lo, mid});
    }
    return out;
}

const GaussLegendreRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) {
        return it->second;
    }
    if (order < 1) {
        throw QuadratureError("Gauss-Legendre order must be positive");
    }
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) {
                p0 = 1.0;
                p1 = x;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

std::vector<QuadratureNode> panel_nodes(const std::vector<Panel>& panels, int order) {
    const auto& rule = gauss_legendre(order);
    std::vector<QuadratureNode> nodes;
    nodes.reserve(panels.size() * rule.nodes.size());
    for (const auto& p : panels) {
        const double center = 0.5 * (p.lo + p.hi);
        const double half = 0.5 * (p.hi - p.lo);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            nodes.push_back({center + half * rule.nodes[k], half * rule.weights[k]});
        }
    }
    return nodes;
}

} // namespace qexcess
