#pragma once

#include "fpme/energy.hpp"
#include "fpme/frlap.hpp"
#include "fpme/grid.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace fpme {

/// gamma(tau) = [(1 - tau) w^q + tau phi_plus^q]^(1/q); both ends nonnegative.
GridFunction gamma_path(const GridFunction& w, const GridFunction& phi_plus, double tau, double q);

/// sigma(tau) = phi0+ - tau phi0-.
GridFunction sigma_path(const GridFunction& phi0, double tau);

/// gamma(2t) from w to phi0+ on [0, 1/2], then sigma(2t - 1) on [1/2, 1].
GridFunction theta_path(const GridFunction& w, const GridFunction& phi0, double t, double q);

/// F(sigma(tau)) = A tau^2 - B tau^q + C tau + K.
struct HCoeffs {
    double A = 0.0;  // [phi0-]^2 / 2
    double B = 0.0;  // (alpha/q) sum h |phi0-|^q
    double C = 0.0;  // cross_term(phi0)
    double K = 0.0;  // F(phi0+)
    double tau0 = std::numeric_limits<double>::infinity();  // (qB/2A)^(1/(2-q)); +inf if phi0- = 0
    double max_identity_error = 0.0;  // at tau in {0, 1/2, 1}, / scale
    bool verified = false;            // max_identity_error <= 1e-10

    double h(double tau, double q) const { return A * tau * tau - B * std::pow(tau, q); }
    double sigma_energy(double tau, double q) const { return h(tau, q) + C * tau + K; }
};

HCoeffs h_coeffs(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi0);

struct PathProfile {
    std::vector<double> taus;
    std::vector<double> energies;
    std::vector<double> bounds;  // per-sample bound; empty when none applies
    double max_energy = 0.0;
    double bound_value = 0.0;  // largest bound over the samples
    bool bound_holds = true;   // energies <= bounds + 1e-10 scale at every sample
};

using PathFn = std::function<GridFunction(double)>;
using BoundFn = std::function<double(double)>;

/// Energies of path(tau) on a uniform grid of n_samples >= 11 points in [0, 1].
PathProfile path_profile(const PathFn& path, const StiffnessForm& form, const EnergyParams& p, int n_samples,
                         const BoundFn& bound = {});

/// gamma path from w to phi_plus with the chord bound (1 - tau) F(w) + tau F(phi_plus).
PathProfile gamma_profile(const StiffnessForm& form, const EnergyParams& p, const GridFunction& w,
                          const GridFunction& phi_plus, int n_samples);

/// sigma path of phi0 with the bound given by its h-coefficients (an identity).
PathProfile sigma_profile(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi0, int n_samples);

/// Second differences of tau -> gamma(tau)^T A gamma(tau) / 2 on n_samples points.
std::vector<double> seminorm_second_differences(const StiffnessForm& form, const GridFunction& a,
                                                const GridFunction& b, double q, int n_samples);

struct StringOptions {
    int n_images = 32;
    int max_iter = 100000;
    double energy_tol = 1e-10;  // max per-iteration image energy change, / scale
    bool climbing = true;       // highest interior image climbs along the tangent
    int climb_after = 200;      // iterations of plain descent before climbing starts
    double lipschitz = 0.0;     // <= 0: spectral_bound(form)
    double perturbation = 1.0;  // amplitude of the sign-changing bend of the initial string
};

struct SaddleEstimate {
    double lambda_star = 0.0;
    std::vector<GridFunction> images;
    std::vector<double> energies;
    int saddle_index = 0;
    double saddle_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimum-energy path between w and -w by the string method with equal
/// lumped-L2 arc length. The initial string is the segment from w to -w bent by
/// sin(pi tau) * w * r(x), with r the linear ramp from -1 at a to 1 at b; the
/// straight segment is invariant under the flow and stays pinned at 0.
/// Returns the best-so-far string with converged = false after max_iter.
SaddleEstimate string_method(const StiffnessForm& form, const EnergyParams& p, const GridFunction& w,
                             const StringOptions& options = {});

}  // namespace fpme
