#pragma once

#include "fpme/frlap.hpp"
#include "fpme/grid.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace fpme {

struct EnergyBreakdown {
    double seminorm_half = 0.0;  // (1/2) phi^T A phi
    double potential = 0.0;      // (alpha/q) sum_i h |phi_i|^q
    double total = 0.0;          // seminorm_half - potential
    double cross = 0.0;          // -(phi+)^T A (phi-)
};

/// F(phi) = (1/2)[phi]^2 - (alpha/q) int |phi|^q with lumped quadrature.
/// Throws ParamsMismatch if p.s() differs from form.s().
EnergyBreakdown energy(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi);

/// Total energy on raw nodal values; no grid checks.
double energy_value(const StiffnessForm& form, const EnergyParams& p, const Eigen::VectorXd& phi);

/// -(phi+)^T A (phi-), the discrete 2 int int phi+(x) phi-(y) |x-y|^(-1-2s).
double cross_term(const StiffnessForm& form, const GridFunction& phi);

/// max(1, |F(phi)|, [phi]^2).
double energy_scale(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi);

/// ||A phi - alpha h |phi|^(q-2) phi|| / max(1, ||A phi||).
double critical_residual(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi);

struct NehariResidual {
    double r1 = 0.0;  // |F - (1/2 - 1/q)[phi]^2| / scale
    double r2 = 0.0;  // |[phi]^2 - alpha sum h |phi|^q| / scale
};

NehariResidual nehari_residual(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi);

/// C with F(u) >= [u]^2/4 - C:
/// C = ((2-q)/(2q)) alpha^(2/(2-q)) (lambda1/2)^(-q/(2-q)).
double coercivity_constant(const EnergyParams& p, double lambda1);

struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept;  // lhs >= rhs - 1e-12 (1 + |lhs|)
};

/// f(a) - f(b) - f'(b)(a - b) against (m+1)^-3 (g(a) - g(b))^2, f(t) = |t|^(m+1)/(m+1).
InequalitySides bregman_gap(double a, double b, double m);

/// (|a|^(m+1) + |b|^(m+1))/2 against |(a+b)/2|^(m+1) + max(|a|,|b|)^(m-1) |a-b|^2 / 8.
InequalitySides midpoint_gap(double a, double b, double m);

/// (m+1)^-3.
double bregman_constant(double m) noexcept;

/// (s, (1 - s) * cross_term) for a fixed profile, reassembling the form per s.
std::vector<std::pair<double, double>> s_to_one_diagnostic(const Grid& grid,
                                                           const std::function<double(double)>& profile,
                                                           const std::vector<double>& s_list,
                                                           const AssemblyOptions& options = {});

}  // namespace fpme
