#include "fpme/laneemden.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace fpme {

LambdaOne lambda1(const StiffnessForm& form, double q, const LaneEmdenOptions& options) {
    if (!(q > 1.0 && q < 2.0)) throw Error(ErrorKind::InvalidArgument, "need 1 < q < 2, got " + format_double(q));
    const Grid& g = form.grid();
    const double h = g.h();

    Eigen::VectorXd u(g.n());
    if (options.initial) {
        if (options.initial->size() != g.n()) throw Error(ErrorKind::GridMismatch, "initial guess has wrong size");
        u = options.initial->cwiseAbs();
    } else {
        for (int i = 0; i < g.n(); ++i) u[i] = (g.node(i) - g.a()) * (g.b() - g.node(i));
    }
    if (!(u.maxCoeff() > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial guess vanishes");
    auto normalize = [&](Eigen::VectorXd& x) { x /= std::pow(lumped_power_sum(x, h, q), 1.0 / q); };
    normalize(u);

    double lambda = u.dot(form.apply(u));
    for (int it = 1; it <= options.max_iter; ++it) {
        Eigen::VectorXd next = form.solve(h * u.unaryExpr([q](double t) { return std::pow(t, q - 1.0); }));
        next = next.cwiseAbs();
        normalize(next);
        const double lambda_next = next.dot(form.apply(next));
        const double shape_change = (next - u).lpNorm<Eigen::Infinity>() / next.lpNorm<Eigen::Infinity>();
        const double lambda_change = std::abs(lambda_next - lambda) / lambda_next;
        u = std::move(next);
        lambda = lambda_next;
        if (lambda_change <= options.lambda_tol && shape_change <= options.shape_tol) {
            return {lambda, GridFunction(g, u), it};
        }
    }
    throw Error(ErrorKind::NoConvergence,
                "lambda1 iteration did not converge in " + std::to_string(options.max_iter) + " iterations");
}

double minimal_level(const EnergyParams& p, double lambda1) {
    const double q = p.q();
    return (0.5 - 1.0 / q) * std::pow(p.alpha(), 2.0 / (2.0 - q)) * std::pow(lambda1, -q / (2.0 - q));
}

GroundState ground_state(const StiffnessForm& form, const EnergyParams& p, const LaneEmdenOptions& options) {
    if (std::abs(form.s() - p.s()) > 1e-14) throw Error(ErrorKind::ParamsMismatch, "form and params differ in s");
    const double q = p.q();
    const LambdaOne l1 = lambda1(form, q, options);
    const double t_star = std::pow(p.alpha() / l1.lambda1, 1.0 / (2.0 - q));

    GroundState gs{t_star * l1.u_star, l1.lambda1, minimal_level(p, l1.lambda1), l1.iterations, 0.0, {}};
    gs.residual = critical_residual(form, p, gs.w);
    gs.nehari = nehari_residual(form, p, gs.w);
    const double direct = energy_value(form, p, gs.w.values());

    if (gs.residual > 1e-8 || gs.nehari.r1 > 1e-8 || gs.nehari.r2 > 1e-8) {
        throw Error(ErrorKind::NoConvergence, "ground state residual too large: " + format_double(gs.residual));
    }
    if (std::abs(direct - gs.Lambda1) > 1e-10 * std::abs(gs.Lambda1)) {
        throw Error(ErrorKind::NoConvergence, "closed-form level " + format_double(gs.Lambda1) +
                                                  " disagrees with F(w) = " + format_double(direct));
    }
    return gs;
}

UniquenessReport verify_uniqueness(const StiffnessForm& form, const EnergyParams& p,
                                   std::span<const std::uint64_t> seeds) {
    if (seeds.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two trials");
    std::vector<Eigen::VectorXd> states;
    for (std::uint64_t seed : seeds) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(0.05, 1.0);
        LaneEmdenOptions opt;
        opt.initial = Eigen::VectorXd::NullaryExpr(form.grid().n(), [&] { return unif(rng); });
        states.push_back(ground_state(form, p, opt).w.values());
    }
    UniquenessReport rep;
    rep.trials = static_cast<int>(seeds.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j)
            rep.max_distance = std::max(rep.max_distance, (states[i] - states[j]).lpNorm<Eigen::Infinity>());
    rep.threshold = 1e-6 * states.front().lpNorm<Eigen::Infinity>();
    rep.passed = rep.max_distance <= rep.threshold;
    return rep;
}

UniquenessReport verify_uniqueness(const StiffnessForm& form, const EnergyParams& p, int trials, std::uint64_t seed) {
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < trials; ++k) seeds.push_back(seed + static_cast<std::uint64_t>(k));
    return verify_uniqueness(form, p, seeds);
}

}  // namespace fpme
