#pragma once

#include "fpme/energy.hpp"
#include "fpme/frlap.hpp"
#include "fpme/grid.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace fpme {

struct LaneEmdenOptions {
    double lambda_tol = 1e-12;  // relative change of lambda1
    double shape_tol = 1e-11;   // sup-norm change of the normalized iterate, relative
    int max_iter = 10000;
    std::optional<Eigen::VectorXd> initial;  // absolute value is taken; default (x-a)(b-x)
};

struct LambdaOne {
    double lambda1 = 0.0;
    GridFunction u_star;  // nonnegative, sum_i h u_i^q = 1
    int iterations = 0;
};

/// lambda1 = min [u]^2 over sum h |u|^q = 1, by the sublinear inverse
/// iteration u <- A^-1(h u^(q-1)) followed by renormalization.
LambdaOne lambda1(const StiffnessForm& form, double q, const LaneEmdenOptions& options = {});

struct GroundState {
    GridFunction w;
    double lambda1 = 0.0;
    double Lambda1 = 0.0;  // F(w) < 0
    int iterations = 0;
    double residual = 0.0;  // critical_residual(w)
    NehariResidual nehari;
};

/// Positive minimizer w = (alpha/lambda1)^(1/(2-q)) u_star. Throws NoConvergence
/// if the residual checks or the closed form for Lambda1 fail.
GroundState ground_state(const StiffnessForm& form, const EnergyParams& p, const LaneEmdenOptions& options = {});

/// (1/2 - 1/q) alpha^(2/(2-q)) lambda1^(-q/(2-q)).
double minimal_level(const EnergyParams& p, double lambda1);

struct UniquenessReport {
    int trials = 0;
    double max_distance = 0.0;  // max pairwise sup-norm distance
    double threshold = 0.0;     // 1e-6 ||w||_inf
    bool passed = false;
};

/// Ground states from positive random initial guesses, one per seed.
UniquenessReport verify_uniqueness(const StiffnessForm& form, const EnergyParams& p,
                                   std::span<const std::uint64_t> seeds);
UniquenessReport verify_uniqueness(const StiffnessForm& form, const EnergyParams& p, int trials,
                                   std::uint64_t seed = 1);

}  // namespace fpme
