#pragma once

// Test-only reference computations. Nothing here calls into the assembly
// path it is used to check.

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

namespace fpme::oracle {

// Autocorrelation of the unit hat (support [-1,1]): the cubic B-spline
// with M(0) = 2/3.
inline double hat_autocorr(double t) {
    t = std::abs(t);
    if (t <= 1.0) return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
    if (t <= 2.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
    return 0.0;
}

// One-sided third derivative of M on the unit interval [j, j+1], j integer.
inline double hat_autocorr_d3_on(int j) {
    if (j >= 0) return j == 0 ? 3.0 : (j == 1 ? -1.0 : 0.0);
    // M is even, so M''' is odd: on [j, j+1] with j < 0 mirror [-j-1, -j]
    const int mirrored = -j - 1;
    return -(mirrored == 0 ? 3.0 : (mirrored == 1 ? -1.0 : 0.0));
}

inline double hat_autocorr_d2(int k) {
    const int t = std::abs(k);
    if (t == 0) return -2.0;
    if (t == 1) return 1.0;
    return 0.0;
}

/// a(psi_0, psi_k) for hats of width h on the whole real line:
/// 2 * int_0^inf z^(-1-2s) [2B(kh) - B(kh+z) - B(kh-z)] dz, B the hat
/// autocorrelation. For hats vanishing outside (a,b) this equals the
/// stiffness entry A_ij with |i-j| = k.
inline double full_line_generator(int k, double s, double h) {
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    auto d2 = [&](double z) { return 2.0 * hat_autocorr(k) - hat_autocorr(k + z) - hat_autocorr(k - z); };
    // First piece [0,1]: D2 is the cubic -M''(k) z^2 - (M'''+(k) - M'''-(k)) z^3/6.
    const double c2 = -hat_autocorr_d2(k);
    const double c3 = -(hat_autocorr_d3_on(k) - hat_autocorr_d3_on(k - 1)) / 6.0;
    double total = c2 / (2.0 - 2.0 * s) + c3 / (3.0 - 2.0 * s);
    std::set<double> pts{1.0, static_cast<double>(k + 2)};
    for (int j = -2; j <= 2; ++j) {
        const double z = std::abs(j - k);
        if (z > 1.0) pts.insert(z);
    }
    std::vector<double> v(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        total += Gauss::integrate([&](double z) { return std::pow(z, -1.0 - 2.0 * s) * d2(z); }, v[i], v[i + 1]);
    }
    total += 2.0 * hat_autocorr(k) * std::pow(k + 2.0, -2.0 * s) / (2.0 * s);
    return 2.0 * std::pow(h, 1.0 - 2.0 * s) * total;
}

inline Eigen::MatrixXd full_line_toeplitz(int n, double s, double h) {
    std::vector<double> gen(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) gen[static_cast<std::size_t>(k)] = full_line_generator(k, s, h);
    Eigen::MatrixXd T(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T(i, j) = gen[static_cast<std::size_t>(std::abs(i - j))];
    return T;
}

/// Integral of u(x)^2 rho(x) over (a,b) for the hat interpolant u of
/// `values`, by composite 30-point Gauss on graded sub-intervals.
template <typename Rho>
double exterior_quadratic(const Eigen::VectorXd& values, double a, double h, Rho&& rho) {
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    const int n = static_cast<int>(values.size());
    double total = 0.0;
    for (int e = 0; e <= n; ++e) {
        const double ul = e == 0 ? 0.0 : values[e - 1];
        const double ur = e == n ? 0.0 : values[e];
        const double x0 = a + e * h;
        auto f = [&](double x) {
            const double t = (x - x0) / h;
            const double u = ul * (1.0 - t) + ur * t;
            return u * u * rho(x);
        };
        // geometric grading towards element ends adjacent to the boundary
        double lo = x0;
        double hi = x0 + h;
        if (e == 0 || e == n) {
            const bool left = e == 0;
            double inner = left ? lo : hi;
            double width = h;
            for (int level = 0; level < 40; ++level) {
                const double next = width * 0.5;
                if (left)
                    total += Gauss::integrate(f, inner + next, inner + width);
                else
                    total += Gauss::integrate(f, inner - width, inner - next);
                width = next;
            }
        } else {
            total += Gauss::integrate(f, lo, hi);
        }
    }
    return total;
}

/// min of u^T A u / (sum h u^q)^(2/q) over u >= 0 by projected gradient with
/// Barzilai-Borwein steps, best of `restarts` random starts.
inline double rayleigh_min(const Eigen::MatrixXd& A, double h, double q, int restarts, unsigned seed,
                           int max_iter = 200000) {
    const Eigen::Index n = A.rows();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto norm_q = [&](const Eigen::VectorXd& u) { return std::pow(h * u.array().pow(q).sum(), 1.0 / q); };
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd u(n);
        for (auto& x : u) x = unif(rng);
        u /= norm_q(u);
        Eigen::VectorXd Au = A * u;
        double R = u.dot(Au);
        Eigen::VectorXd grad = 2.0 * Au - 2.0 * R * h * u.array().pow(q - 1.0).matrix();
        double step = 1e-3 / grad.norm();
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXd next = (u - step * grad).cwiseMax(0.0);
            next /= norm_q(next);
            const Eigen::VectorXd Anext = A * next;
            const double Rn = next.dot(Anext);
            const Eigen::VectorXd gn = 2.0 * Anext - 2.0 * Rn * h * next.array().pow(q - 1.0).matrix();
            const Eigen::VectorXd ds = next - u;
            const Eigen::VectorXd dy = gn - grad;
            const double sy = ds.dot(dy);
            step = sy > 0.0 ? ds.squaredNorm() / sy : 1e-3 / gn.norm();
            u = next;
            grad = gn;
            R = Rn;
            if (ds.norm() <= 1e-13 * u.norm()) break;
        }
        best = std::min(best, R);
    }
    return best;
}

}  // namespace fpme::oracle
