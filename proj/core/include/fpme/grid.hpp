#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fpme {

/// Uniform mesh on the interval (a, b) with n interior nodes x_i = a + i*h,
/// i = 1..n, h = (b - a)/(n + 1). Functions on the grid vanish at a, b and
/// outside the interval.
class Grid {
public:
    static constexpr int kMinNodes = 8;

    Grid(double a, double b, int n);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    int n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    double length() const noexcept { return b_ - a_; }

    /// Interior node, 0-based: node(0) = a + h.
    double node(int i) const noexcept { return a_ + (i + 1) * h_; }
    std::vector<double> nodes() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double a_;
    double b_;
    int n_;
    double h_;
};

Grid make_grid(double a, double b, int n);

/// Nodal values of a continuous piecewise-linear function vanishing outside (a, b).
class GridFunction {
public:
    explicit GridFunction(const Grid& grid);  // zero function
    GridFunction(const Grid& grid, Eigen::VectorXd values);

    template <typename F>
    static GridFunction sample(const Grid& grid, F&& f) {
        Eigen::VectorXd v(grid.n());
        for (int i = 0; i < grid.n(); ++i) v[i] = f(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    int size() const noexcept { return grid_.n(); }
    double operator[](int i) const { return values_[i]; }

    GridFunction operator-() const { return GridFunction(grid_, -values_); }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

GridFunction operator+(const GridFunction& f, const GridFunction& g);
GridFunction operator-(const GridFunction& f, const GridFunction& g);
GridFunction operator*(double c, const GridFunction& f);

void require_same_grid(const Grid& g1, const Grid& g2);

/// Admissible exponents of the energy: 0 < s < 1, m > 1, alpha > 0, and the
/// conjugate exponent q = (m + 1)/m in (1, 2), always derived from m.
class EnergyParams {
public:
    EnergyParams(double s, double m, double alpha);
    /// alpha = 1/(m - 1), the self-similar rescaling exponent.
    static EnergyParams with_default_alpha(double s, double m);

    double s() const noexcept { return s_; }
    double m() const noexcept { return m_; }
    double q() const noexcept { return (m_ + 1.0) / m_; }
    double alpha() const noexcept { return alpha_; }

private:
    double s_;
    double m_;
    double alpha_;
};

/// Lumped discrete L^p norm: (sum_i h |f_i|^p)^(1/p).
double lp_norm(const GridFunction& f, double p);

/// Lumped integral sum_i h f_i.
double lumped_integral(const GridFunction& f);

/// Lumped sum_i h |f_i|^q.
double lumped_power_sum(const Eigen::VectorXd& values, double h, double q);

/// Phi(v) = |v|^(m-1) v.
GridFunction phi_map(const GridFunction& v, double m);
/// Phi^-1(p) = |p|^(q-2) p, with q = (m+1)/m (value 0 at p = 0).
GridFunction phi_inv(const GridFunction& p, double q);
/// g(v) = |v|^((m-1)/2) v.
GridFunction g_map(const GridFunction& v, double m);

GridFunction pos_part(const GridFunction& f);
GridFunction neg_part(const GridFunction& f);

/// Scalar signed power |t|^e t, continuous at 0 for e > -1.
double signed_pow(double t, double e) noexcept;

// Two-column CSV `x,value`, interior nodes only, 17 significant digits.
std::string to_csv(const GridFunction& f);
void write_csv(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_csv(const std::filesystem::path& path, const Grid& grid);

}  // namespace fpme
