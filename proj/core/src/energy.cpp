#include "fpme/energy.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <algorithm>
#include <cmath>

namespace fpme {

namespace {

void require_params(const StiffnessForm& form, const EnergyParams& p) {
    if (std::abs(form.s() - p.s()) > 1e-14) {
        throw Error(ErrorKind::ParamsMismatch,
                    "form assembled for s=" + format_double(form.s()) + ", params have s=" + format_double(p.s()));
    }
}

Eigen::VectorXd sublinear(const Eigen::VectorXd& phi, double q) {
    return phi.unaryExpr([q](double t) { return signed_pow(t, q - 2.0); });
}

}  // namespace

EnergyBreakdown energy(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi) {
    require_params(form, p);
    require_same_grid(form.grid(), phi.grid());
    const Eigen::VectorXd& x = phi.values();
    EnergyBreakdown e;
    e.seminorm_half = 0.5 * x.dot(form.apply(x));
    e.potential = p.alpha() / p.q() * lumped_power_sum(x, form.grid().h(), p.q());
    e.total = e.seminorm_half - e.potential;
    e.cross = cross_term(form, phi);
    return e;
}

double energy_value(const StiffnessForm& form, const EnergyParams& p, const Eigen::VectorXd& phi) {
    return 0.5 * phi.dot(form.apply(phi)) - p.alpha() / p.q() * lumped_power_sum(phi, form.grid().h(), p.q());
}

double cross_term(const StiffnessForm& form, const GridFunction& phi) {
    require_same_grid(form.grid(), phi.grid());
    const Eigen::VectorXd pos = phi.values().cwiseMax(0.0);
    const Eigen::VectorXd neg = (-phi.values()).cwiseMax(0.0);
    if (pos.isZero(0.0) || neg.isZero(0.0)) return 0.0;
    return -pos.dot(form.apply(neg));
}

double energy_scale(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi) {
    require_params(form, p);
    const double semi = seminorm_sq(form, phi);
    const double total = energy_value(form, p, phi.values());
    return std::max({1.0, std::abs(total), semi});
}

double critical_residual(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi) {
    require_params(form, p);
    require_same_grid(form.grid(), phi.grid());
    const Eigen::VectorXd Ax = form.apply(phi.values());
    const Eigen::VectorXd r = Ax - p.alpha() * form.grid().h() * sublinear(phi.values(), p.q());
    return r.norm() / std::max(1.0, Ax.norm());
}

NehariResidual nehari_residual(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi) {
    require_params(form, p);
    require_same_grid(form.grid(), phi.grid());
    const Eigen::VectorXd& x = phi.values();
    const double semi = x.dot(form.apply(x));
    const double power = lumped_power_sum(x, form.grid().h(), p.q());
    const double total = 0.5 * semi - p.alpha() / p.q() * power;
    const double scale = std::max({1.0, std::abs(total), semi});
    const double factor = 0.5 - 1.0 / p.q();
    return {std::abs(total - factor * semi) / scale, std::abs(semi - p.alpha() * power) / scale};
}

double coercivity_constant(const EnergyParams& p, double lambda1) {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) {
        throw Error(ErrorKind::InvalidArgument, "lambda1 must be positive, got " + format_double(lambda1));
    }
    const double q = p.q();
    return (2.0 - q) / (2.0 * q) * std::pow(p.alpha(), 2.0 / (2.0 - q)) *
           std::pow(0.5 * lambda1, -q / (2.0 - q));
}

bool InequalitySides::holds() const noexcept { return lhs >= rhs - 1e-12 * (1.0 + std::abs(lhs)); }

double bregman_constant(double m) noexcept { return 1.0 / ((m + 1.0) * (m + 1.0) * (m + 1.0)); }

InequalitySides bregman_gap(double a, double b, double m) {
    auto f = [m](double t) { return std::pow(std::abs(t), m + 1.0) / (m + 1.0); };
    const double dfb = signed_pow(b, m - 1.0);
    const double ga = signed_pow(a, 0.5 * (m - 1.0));
    const double gb = signed_pow(b, 0.5 * (m - 1.0));
    return {f(a) - f(b) - dfb * (a - b), bregman_constant(m) * (ga - gb) * (ga - gb)};
}

InequalitySides midpoint_gap(double a, double b, double m) {
    const double e = m + 1.0;
    const double lhs = 0.5 * std::pow(std::abs(a), e) + 0.5 * std::pow(std::abs(b), e);
    const double weight = std::pow(std::max(std::abs(a), std::abs(b)), m - 1.0);
    const double rhs = std::pow(std::abs(0.5 * (a + b)), e) + 0.125 * weight * (a - b) * (a - b);
    return {lhs, rhs};
}

std::vector<std::pair<double, double>> s_to_one_diagnostic(const Grid& grid,
                                                           const std::function<double(double)>& profile,
                                                           const std::vector<double>& s_list,
                                                           const AssemblyOptions& options) {
    const GridFunction phi = GridFunction::sample(grid, profile);
    std::vector<std::pair<double, double>> table;
    table.reserve(s_list.size());
    for (double s : s_list) {
        if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidArgument, "s must lie in (0,1), got " + format_double(s));
        const StiffnessForm form = assemble_form(grid, s, options);
        table.emplace_back(s, (1.0 - s) * cross_term(form, phi));
    }
    return table;
}

}  // namespace fpme
