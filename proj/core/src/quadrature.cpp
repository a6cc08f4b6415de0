#include "fpme/quadrature.hpp"

#include "fpme/error.hpp"

#include <cmath>
#include <numbers>

namespace fpme {

GaussRule gauss_legendre(int order) {
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "quadrature order must be positive");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < order; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        dp = order * (x * p0 - p1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(order - 1 - i);
        rule.nodes[lo] = 0.5 * (1.0 - x);
        rule.nodes[hi] = 0.5 * (1.0 + x);
        rule.weights[lo] = 0.5 * w;
        rule.weights[hi] = 0.5 * w;
    }
    return rule;
}

double power_moment(int k, double s, double lo, double hi) {
    const double p = k - 2.0 * s;  // antiderivative exponent
    if (lo == 0.0) {
        if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "divergent power moment at 0");
        return std::pow(hi, p) / p;
    }
    const double log_ratio = std::log(hi / lo);
    if (std::abs(p) < 1e-14) return log_ratio;
    // lo^p (exp(p log(hi/lo)) - 1)/p stays accurate as p -> 0.
    return std::pow(lo, p) * std::expm1(p * log_ratio) / p;
}

}  // namespace fpme
