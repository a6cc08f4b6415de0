#pragma once

#include <vector>

namespace fpme {

struct GaussRule {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with `order` points mapped to [0, 1].
GaussRule gauss_legendre(int order);

/// Integral of t^(k - 1 - 2s) over [lo, hi], 0 <= lo < hi. The logarithmic
/// antiderivative is used when the exponent equals -1; for lo = 0 the
/// exponent must exceed -1.
double power_moment(int k, double s, double lo, double hi);

}  // namespace fpme
