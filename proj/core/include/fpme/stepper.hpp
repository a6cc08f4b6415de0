#pragma once

#include "fpme/energy.hpp"
#include "fpme/frlap.hpp"
#include "fpme/grid.hpp"
#include "fpme/laneemden.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fpme {

/// Lumped phi(v, f) = sum h [ (|f|^(m+1) - |v|^(m+1))/(m+1) + Phi(v)(v - f) ] >= 0.
double rel_entropy(const GridFunction& v, const GridFunction& f, double m);

struct StepOptions {
    double lipschitz = 0.0;  // <= 0: spectral_bound(form)
    int max_iter = 200000;
    double decrease_tol = 1e-13;  // relative change of the per-step objective
    double residual_tol = 1e-10;  // Euler-Lagrange residual / scale
};

struct StepResult {
    GridFunction v_new;
    GridFunction phi_new;  // Phi(v_new)
    double energy_prev = 0.0;
    double energy_new = 0.0;
    double rel_entropy = 0.0;
    double dissipation = 0.0;  // C0(m) sum h_x (g(v_new) - g(v_prev))^2 / dt
    int inner_iterations = 0;
    double inner_residual = 0.0;  // Euler-Lagrange residual / scale
    double scale = 1.0;           // max(1, |F|, [phi]^2) at the previous state
};

/// One implicit Euler step of length dt for dv/dt = -(-Delta)^s Phi(v) + alpha v:
/// minimizes G(phi) = phi^T A phi / 2 + (1/q)(1/dt - alpha) sum h|phi|^q - (1/dt) sum h phi f
/// with f = v_prev by restarted FISTA. Requires dt * alpha < 1.
StepResult step(const StiffnessForm& form, const EnergyParams& p, double dt, const GridFunction& v_prev,
                const StepOptions& options = {});

/// Euler-Lagrange residual ||A Phi(v) + (h/dt)(v - f) - alpha h v|| of a step.
double step_residual(const StiffnessForm& form, const EnergyParams& p, double dt, const GridFunction& v_new,
                     const GridFunction& v_prev);

struct EvolveOptions {
    std::vector<double> snapshot_times;
    std::optional<GroundState> ground;  // solved internally when absent
    StepOptions step;
};

struct RunLedger {
    RunLedger(const Grid& g, const EnergyParams& p, double step, const GridFunction& ground)
        : grid(g), params(p), dt(step), w(ground), final_v(ground) {}

    Grid grid;
    EnergyParams params;
    double dt = 0.0;
    double lambda1 = 0.0;
    double Lambda1 = 0.0;
    GridFunction w;  // ground state used for the distances

    std::vector<double> times;
    std::vector<double> energies;
    std::vector<double> cum_dissipation;
    std::vector<double> dist_plus;   // ||v - w^(q-1)||_{L^(m+1)}
    std::vector<double> dist_minus;  // ||v + w^(q-1)||_{L^(m+1)}
    std::vector<double> mass;        // sum h v
    std::map<double, GridFunction> snapshots;
    GridFunction final_v;

    double scale = 1.0;  // max(1, |F|, [phi]^2) at t = 0
    double max_energy_increase = 0.0;  // worst per-step increase / scale
    double max_eed_excess = 0.0;       // worst E_k + D_k - E_0, / scale
    int max_inner_iterations = 0;
    double max_inner_residual = 0.0;

    bool complete = false;  // all steps taken
    bool lyapunov_ok = true;
    bool eed_ok = true;
    std::string failure;

    bool valid() const noexcept { return complete && lyapunov_ok && eed_ok; }
};

/// Runs ceil(T/dt) steps from v(0) = u0. Step errors end the run with a partial
/// ledger (complete = false) instead of throwing.
RunLedger evolve(const StiffnessForm& form, const EnergyParams& p, const GridFunction& u0, double dt, double T,
                 const EvolveOptions& options = {});

/// Default time step min(0.05, 0.5/alpha).
double default_time_step(const EnergyParams& p) noexcept;

/// v(x, tau) = e^(alpha tau) u(x, e^tau - 1), given u at time t.
GridFunction rescale_to_v(const GridFunction& u, double t, double alpha);
/// u(x, t) = (1 + t)^(-alpha) v(x, log(1 + t)), given v at time tau.
GridFunction rescale_to_u(const GridFunction& v, double tau, double alpha);

}  // namespace fpme
