#include "fpme/stepper.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <algorithm>
#include <cmath>

namespace fpme {

namespace {

// Root of sigma^m + kappa sigma = y for y >= 0. Newton from an upper bound
// decreases monotonically onto the root (the left side is convex).
double prox_sigma(double y, double m, double kappa) {
    if (y == 0.0) return 0.0;
    double s = std::min(y / kappa, std::pow(y, 1.0 / m));
    for (int it = 0; it < 200; ++it) {
        const double sm1 = std::pow(s, m - 1.0);
        const double next = s - (s * sm1 + kappa * s - y) / (m * sm1 + kappa);
        if (!(next < s)) break;
        s = next;
    }
    return s;
}

void require_step(const StiffnessForm& form, const EnergyParams& p, double dt) {
    if (std::abs(form.s() - p.s()) > 1e-14) throw Error(ErrorKind::ParamsMismatch, "form and params differ in s");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
    if (dt * p.alpha() >= 1.0) {
        throw Error(ErrorKind::StepTooLarge, "need dt * alpha < 1, got " + format_double(dt * p.alpha()));
    }
}

double dissipation_of(const GridFunction& v_new, const GridFunction& v_prev, double m, double dt) {
    const Eigen::VectorXd dg = g_map(v_new, m).values() - g_map(v_prev, m).values();
    return bregman_constant(m) * v_new.grid().h() * dg.squaredNorm() / dt;
}

}  // namespace

double rel_entropy(const GridFunction& v, const GridFunction& f, double m) {
    require_same_grid(v.grid(), f.grid());
    const double e = m + 1.0;
    double sum = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        const double vi = v[i];
        const double fi = f[i];
        sum += (std::pow(std::abs(fi), e) - std::pow(std::abs(vi), e)) / e + signed_pow(vi, m - 1.0) * (vi - fi);
    }
    return v.grid().h() * sum;
}

double step_residual(const StiffnessForm& form, const EnergyParams& p, double dt, const GridFunction& v_new,
                     const GridFunction& v_prev) {
    require_same_grid(form.grid(), v_new.grid());
    require_same_grid(form.grid(), v_prev.grid());
    const double h = form.grid().h();
    const Eigen::VectorXd phi = phi_map(v_new, p.m()).values();
    return (form.apply(phi) + (h / dt) * (v_new.values() - v_prev.values()) - p.alpha() * h * v_new.values()).norm();
}

StepResult step(const StiffnessForm& form, const EnergyParams& p, double dt, const GridFunction& v_prev,
                const StepOptions& options) {
    require_step(form, p, dt);
    require_same_grid(form.grid(), v_prev.grid());
    const Grid& grid = form.grid();
    const double h = grid.h();
    const double m = p.m();
    const double q = p.q();
    const double L = options.lipschitz > 0.0 ? options.lipschitz : spectral_bound(form);
    const double eta = 1.0 / L;
    const double c = (1.0 / dt - p.alpha()) / q;
    const double kappa = eta * c * q * h;
    const Eigen::VectorXd b = (h / dt) * v_prev.values();

    auto prox = [&](const Eigen::VectorXd& z, Eigen::VectorXd& phi, Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double sigma = prox_sigma(std::abs(z[i]), m, kappa);
            v[i] = z[i] < 0.0 ? -sigma : sigma;
            phi[i] = signed_pow(v[i], m - 1.0);
        }
    };
    auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& Ax, double& gscale) {
        const double quad = 0.5 * x.dot(Ax);
        const double power = c * lumped_power_sum(x, h, q);
        const double lin = b.dot(x);
        gscale = std::max({1.0, std::abs(quad), std::abs(power), std::abs(lin)});
        return quad + power - lin;
    };

    const Eigen::VectorXd phi_prev = phi_map(v_prev, m).values();
    Eigen::VectorXd x = phi_prev;
    Eigen::VectorXd vx = v_prev.values();
    Eigen::VectorXd Ax = form.apply(x);
    const double energy_prev = 0.5 * x.dot(Ax) - p.alpha() / q * lumped_power_sum(x, h, q);
    const double scale_prev = std::max({1.0, std::abs(energy_prev), x.dot(Ax)});

    double gscale = 1.0;
    double G = objective(x, Ax, gscale);
    Eigen::VectorXd y = x;
    Eigen::VectorXd Ay = Ax;
    Eigen::VectorXd xn(x.size());
    Eigen::VectorXd vn(x.size());
    double t = 1.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    for (int k = 1; k <= options.max_iter; ++k) {
        iterations = k;
        prox(y - eta * (Ay - b), xn, vn);
        Eigen::VectorXd Axn = form.apply(xn);
        const double Gn = objective(xn, Axn, gscale);
        const double semi = xn.dot(Axn);
        const double energy_n = 0.5 * semi - p.alpha() / q * lumped_power_sum(xn, h, q);
        const double scale_n = std::max({1.0, std::abs(energy_n), semi});
        residual = (Axn + (h * (1.0 / dt - p.alpha())) * vn - b).norm() / scale_n;
        const bool small_change = std::abs(Gn - G) <= options.decrease_tol * gscale;

        if ((y - xn).dot(xn - x) > 0.0) {
            // gradient restart
            t = 1.0;
            y = xn;
            Ay = Axn;
        } else {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double beta = (t - 1.0) / tn;
            y = xn + beta * (xn - x);
            Ay = Axn + beta * (Axn - Ax);
            t = tn;
        }
        x.swap(xn);
        vx.swap(vn);
        Ax.swap(Axn);
        G = Gn;
        if (small_change && residual <= options.residual_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw Error(ErrorKind::InnerNoConvergence, "per-step solver stopped after " + std::to_string(iterations) +
                                                       " iterations, residual " + format_double(residual));
    }

    StepResult res{GridFunction(grid, vx), GridFunction(grid, x), energy_prev, 0.0, 0.0, 0.0, iterations, residual,
                   scale_prev};
    res.energy_new = 0.5 * x.dot(Ax) - p.alpha() / q * lumped_power_sum(x, h, q);
    res.rel_entropy = rel_entropy(res.v_new, v_prev, m);
    res.dissipation = dissipation_of(res.v_new, v_prev, m, dt);

    if (res.rel_entropy < -1e-12 * scale_prev) {
        throw Error(ErrorKind::InnerNoConvergence, "negative relative entropy " + format_double(res.rel_entropy));
    }
    if (res.energy_new + res.rel_entropy / dt > energy_prev + 1e-10 * scale_prev) {
        throw Error(ErrorKind::InnerNoConvergence, "step violates the minimality inequality");
    }
    if (res.rel_entropy / dt < res.dissipation - 1e-12 * std::max(1.0, res.rel_entropy / dt)) {
        throw Error(ErrorKind::InnerNoConvergence, "step violates the entropy-dissipation inequality");
    }
    return res;
}

double default_time_step(const EnergyParams& p) noexcept { return std::min(0.05, 0.5 / p.alpha()); }

RunLedger evolve(const StiffnessForm& form, const EnergyParams& p, const GridFunction& u0, double dt, double T,
                 const EvolveOptions& options) {
    require_step(form, p, dt);
    require_same_grid(form.grid(), u0.grid());
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidArgument, "final time must be positive");

    const GroundState gs = options.ground ? *options.ground : ground_state(form, p);
    require_same_grid(form.grid(), gs.w.grid());
    const Eigen::VectorXd target = phi_inv(gs.w, p.q()).values();  // w^(q-1)
    const double m = p.m();
    const double h = form.grid().h();

    StepOptions step_opt = options.step;
    if (step_opt.lipschitz <= 0.0) step_opt.lipschitz = spectral_bound(form);

    const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
    std::map<long, double> wanted;
    for (double ts : options.snapshot_times) {
        if (ts < 0.0) continue;
        wanted.emplace(std::clamp(std::lround(ts / dt), 0L, steps), ts);
    }

    RunLedger led(form.grid(), p, dt, gs.w);
    led.lambda1 = gs.lambda1;
    led.Lambda1 = gs.Lambda1;
    auto record = [&](long k, const GridFunction& v, double energy, double cum) {
        led.times.push_back(static_cast<double>(k) * dt);
        led.energies.push_back(energy);
        led.cum_dissipation.push_back(cum);
        led.dist_plus.push_back(lp_norm(GridFunction(led.grid, v.values() - target), m + 1.0));
        led.dist_minus.push_back(lp_norm(GridFunction(led.grid, v.values() + target), m + 1.0));
        led.mass.push_back(h * v.values().sum());
        if (wanted.count(k)) led.snapshots.emplace(static_cast<double>(k) * dt, v);
    };

    const GridFunction phi0 = phi_map(u0, m);
    const double E0 = energy_value(form, p, phi0.values());
    led.scale = std::max({1.0, std::abs(E0), seminorm_sq(form, phi0)});
    record(0, u0, E0, 0.0);

    GridFunction v = u0;
    double cum = 0.0;
    for (long k = 1; k <= steps; ++k) {
        std::optional<StepResult> taken;
        try {
            taken.emplace(step(form, p, dt, v, step_opt));
        } catch (const Error& e) {
            led.failure = "step " + std::to_string(k) + ": " + e.what();
            led.final_v = v;
            return led;
        }
        StepResult& res = *taken;
        cum += res.dissipation;
        const double increase = (res.energy_new - led.energies.back()) / res.scale;
        led.max_energy_increase = std::max(led.max_energy_increase, increase);
        if (increase > 1e-10 && led.lyapunov_ok) {
            led.lyapunov_ok = false;
            if (led.failure.empty()) led.failure = "energy increased at step " + std::to_string(k);
        }
        const double excess = (res.energy_new + cum - E0) / led.scale;
        led.max_eed_excess = std::max(led.max_eed_excess, excess);
        if (excess > 1e-9 && led.eed_ok) {
            led.eed_ok = false;
            if (led.failure.empty()) led.failure = "energy-dissipation inequality violated at step " + std::to_string(k);
        }
        led.max_inner_iterations = std::max(led.max_inner_iterations, res.inner_iterations);
        led.max_inner_residual = std::max(led.max_inner_residual, res.inner_residual);
        v = std::move(res.v_new);
        record(k, v, res.energy_new, cum);
    }
    led.final_v = v;
    led.complete = true;
    return led;
}

GridFunction rescale_to_v(const GridFunction& u, double t, double alpha) {
    if (!(t >= 0.0)) throw Error(ErrorKind::NonpositiveTime, "time must be nonnegative");
    return std::exp(alpha * std::log1p(t)) * u;
}

GridFunction rescale_to_u(const GridFunction& v, double tau, double alpha) {
    if (!(tau >= 0.0)) throw Error(ErrorKind::NonpositiveTime, "time must be nonnegative");
    return std::exp(-alpha * tau) * v;
}

}  // namespace fpme
