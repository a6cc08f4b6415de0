#pragma once

#include "fpme/energy.hpp"
#include "fpme/stepper.hpp"

#include <string>

namespace fpme {

enum class Branch { Assnl1, Assnl2, NotApplicable };
std::string to_string(Branch b);

struct OmegaDistance {
    double d_plus = 0.0;   // ||v - w^(q-1)||_{L^(m+1)}
    double d_minus = 0.0;  // ||v + w^(q-1)||_{L^(m+1)}
};

OmegaDistance omega_distance(const GridFunction& v, const GridFunction& w, double m);

struct Verdict {
    bool converged = false;
    int sign = 0;  // +1, -1, or 0 when undetermined
    double final_distance = 0.0;
    double plateau_energy = 0.0;
    double plateau_gap = 0.0;  // |plateau_energy - Lambda1| / scale
    bool plateau_ok = false;   // plateau_gap <= 1e-6 when converged
    double energy_drift = 0.0;  // max - min energy over the window, / scale
    int criterion_prediction = 0;  // +1 or 0 (none), filled from selection_predict
    Branch criterion_branch = Branch::NotApplicable;
};

struct StabilizationOptions {
    double tol = 1e-3;
    double window_fraction = 0.2;  // used when window <= 0
    double window = 0.0;           // absolute trailing window length
};

/// Converged iff the ledger covers the window, the terminal min(d_plus, d_minus)
/// is <= tol, the nearer profile does not change over the window, and the
/// energy varies by at most tol * scale over it. Throws InvalidLedger on an
/// invalid ledger.
Verdict detect_stabilization(const RunLedger& ledger, const StabilizationOptions& options = {});

/// critical_residual(Phi(v(T))).
double terminal_residual(const StiffnessForm& form, const EnergyParams& p, const RunLedger& ledger);

struct Selection {
    int prediction = 0;  // +1 or 0 (none)
    Branch branch = Branch::NotApplicable;
    double energy_total = 0.0;  // F(Phi(u0))
    double energy_pos = 0.0;    // F(Phi(u0)+)
    double energy_neg = 0.0;    // F(Phi(u0)-)
    double cross = 0.0;         // cross_term(Phi(u0))
    double lambda2_est = 0.0;
};

/// Sign-selection criterion with a supplied estimate of the second critical
/// level. Heuristic: lambda2_est is not a certified lower bound.
Selection selection_predict(const StiffnessForm& form, const EnergyParams& p, const GridFunction& u0,
                            double lambda2_est);

/// lambda_star - 0.1 |lambda_star|.
double default_lambda2_estimate(double lambda_star) noexcept;

/// Smooth bump (1 - ((x - center)/width)^2)^2 on |x - center| < width.
GridFunction bump(const Grid& grid, double center, double width);

/// Datum with Phi(u0) = psi+ - neg_scale * psi-, psi = w - amplitude * bump(center, width).
GridFunction bump_mix(const GridFunction& w, double amplitude, double center, double width, double m,
                      double neg_scale = 1.0);

/// S(x, t) = t^(-alpha) w(x)^(q-1).
GridFunction friendly_giant(const GridFunction& w, double t, const EnergyParams& p);

}  // namespace fpme
