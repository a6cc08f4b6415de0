#include "fpme/asymptotics.hpp"

#include "fpme/error.hpp"

#include <algorithm>
#include <cmath>

namespace fpme {

std::string to_string(Branch b) {
    switch (b) {
        case Branch::Assnl1: return "assnl1";
        case Branch::Assnl2: return "assnl2";
        case Branch::NotApplicable: return "not-applicable";
    }
    return "not-applicable";
}

OmegaDistance omega_distance(const GridFunction& v, const GridFunction& w, double m) {
    require_same_grid(v.grid(), w.grid());
    const GridFunction target = phi_inv(w, (m + 1.0) / m);
    return {lp_norm(v - target, m + 1.0), lp_norm(v + target, m + 1.0)};
}

Verdict detect_stabilization(const RunLedger& ledger, const StabilizationOptions& options) {
    if (!ledger.valid()) throw Error(ErrorKind::InvalidLedger, "ledger is invalid: " + ledger.failure);
    if (ledger.times.empty()) throw Error(ErrorKind::InvalidLedger, "ledger has no entries");

    const std::size_t last = ledger.times.size() - 1;
    const double t_end = ledger.times[last];
    const double window = options.window > 0.0 ? options.window : options.window_fraction * t_end;

    Verdict v;
    v.plateau_energy = ledger.energies[last];
    v.final_distance = std::min(ledger.dist_plus[last], ledger.dist_minus[last]);
    v.plateau_gap = std::abs(v.plateau_energy - ledger.Lambda1) / ledger.scale;

    const bool plus_nearer = ledger.dist_plus[last] <= ledger.dist_minus[last];
    const bool covered = window > 0.0 && t_end - ledger.times.front() >= window - 1e-12;
    bool same_side = true;
    double e_min = v.plateau_energy;
    double e_max = v.plateau_energy;
    for (std::size_t k = 0; k <= last; ++k) {
        if (ledger.times[k] < t_end - window - 1e-12) continue;
        same_side = same_side && ((ledger.dist_plus[k] <= ledger.dist_minus[k]) == plus_nearer);
        e_min = std::min(e_min, ledger.energies[k]);
        e_max = std::max(e_max, ledger.energies[k]);
    }
    v.energy_drift = (e_max - e_min) / ledger.scale;

    v.converged = covered && v.final_distance <= options.tol && same_side && v.energy_drift <= options.tol;
    if (v.converged) {
        v.sign = plus_nearer ? 1 : -1;
        v.plateau_ok = v.plateau_gap <= 1e-6;
    }
    return v;
}

double terminal_residual(const StiffnessForm& form, const EnergyParams& p, const RunLedger& ledger) {
    return critical_residual(form, p, phi_map(ledger.final_v, p.m()));
}

Selection selection_predict(const StiffnessForm& form, const EnergyParams& p, const GridFunction& u0,
                            double lambda2_est) {
    const GridFunction phi = phi_map(u0, p.m());
    Selection sel;
    sel.lambda2_est = lambda2_est;
    sel.energy_total = energy_value(form, p, phi.values());
    sel.energy_pos = energy_value(form, p, pos_part(phi).values());
    sel.energy_neg = energy_value(form, p, neg_part(phi).values());
    sel.cross = cross_term(form, phi);
    if (sel.energy_neg > 0.0 && sel.energy_total < lambda2_est) {
        sel.prediction = 1;
        sel.branch = Branch::Assnl1;
    } else if (sel.energy_neg <= 0.0 && sel.energy_pos + sel.cross < lambda2_est) {
        sel.prediction = 1;
        sel.branch = Branch::Assnl2;
    }
    return sel;
}

double default_lambda2_estimate(double lambda_star) noexcept { return lambda_star - 0.1 * std::abs(lambda_star); }

GridFunction bump(const Grid& grid, double center, double width) {
    if (!(width > 0.0)) throw Error(ErrorKind::InvalidArgument, "bump width must be positive");
    return GridFunction::sample(grid, [&](double x) {
        const double t = (x - center) / width;
        return std::abs(t) < 1.0 ? (1.0 - t * t) * (1.0 - t * t) : 0.0;
    });
}

GridFunction bump_mix(const GridFunction& w, double amplitude, double center, double width, double m,
                      double neg_scale) {
    const GridFunction psi = w - amplitude * bump(w.grid(), center, width);
    return phi_inv(pos_part(psi) - neg_scale * neg_part(psi), (m + 1.0) / m);
}

GridFunction friendly_giant(const GridFunction& w, double t, const EnergyParams& p) {
    if (!(t > 0.0)) throw Error(ErrorKind::NonpositiveTime, "Friendly Giant needs t > 0");
    if (w.values().minCoeff() <= 0.0) throw Error(ErrorKind::Negativity, "ground state must be positive");
    return std::pow(t, -p.alpha()) * phi_inv(w, p.q());
}

}  // namespace fpme
