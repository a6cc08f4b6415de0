#include "fpme/landscape.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <algorithm>
#include <cmath>

namespace fpme {

namespace {

void require_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorKind::InvalidArgument, "path parameter outside [0,1]: " + format_double(tau));
}

void require_nonnegative(const GridFunction& f, const char* what) {
    if (f.values().minCoeff() < 0.0) throw Error(ErrorKind::Negativity, std::string(what) + " must be nonnegative");
}

// Moves the images strictly between lo and hi to equal lumped-L2 arc length,
// keeping images lo and hi in place.
void reparametrize(Eigen::MatrixXd& images, Eigen::Index lo, Eigen::Index hi) {
    if (hi - lo < 2) return;
    std::vector<double> arc{0.0};
    for (Eigen::Index k = lo; k < hi; ++k) arc.push_back(arc.back() + (images.col(k + 1) - images.col(k)).norm());
    const double total = arc.back();
    if (!(total > 0.0)) return;
    const Eigen::MatrixXd old = images.middleCols(lo, hi - lo + 1);
    std::size_t seg = 0;
    for (Eigen::Index j = 1; j < hi - lo; ++j) {
        const double target = total * static_cast<double>(j) / static_cast<double>(hi - lo);
        while (seg + 2 < arc.size() && arc[seg + 1] < target) ++seg;
        const double len = arc[seg + 1] - arc[seg];
        const double theta = len > 0.0 ? std::clamp((target - arc[seg]) / len, 0.0, 1.0) : 0.0;
        images.col(lo + j) = (1.0 - theta) * old.col(static_cast<Eigen::Index>(seg)) +
                             theta * old.col(static_cast<Eigen::Index>(seg) + 1);
    }
}

}  // namespace

GridFunction gamma_path(const GridFunction& w, const GridFunction& phi_plus, double tau, double q) {
    require_same_grid(w.grid(), phi_plus.grid());
    require_tau(tau);
    require_nonnegative(w, "ground state");
    require_nonnegative(phi_plus, "positive part");
    if (tau == 0.0) return w;
    if (tau == 1.0) return phi_plus;
    const Eigen::ArrayXd mix = (1.0 - tau) * w.values().array().pow(q) + tau * phi_plus.values().array().pow(q);
    return GridFunction(w.grid(), mix.pow(1.0 / q).matrix());
}

GridFunction sigma_path(const GridFunction& phi0, double tau) {
    require_tau(tau);
    return pos_part(phi0) - tau * neg_part(phi0);
}

GridFunction theta_path(const GridFunction& w, const GridFunction& phi0, double t, double q) {
    require_tau(t);
    if (t <= 0.5) return gamma_path(w, pos_part(phi0), 2.0 * t, q);
    return sigma_path(phi0, 2.0 * t - 1.0);
}

HCoeffs h_coeffs(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi0) {
    const double q = p.q();
    const GridFunction neg = neg_part(phi0);
    HCoeffs c;
    c.A = 0.5 * seminorm_sq(form, neg);
    c.B = p.alpha() / q * lumped_power_sum(neg.values(), form.grid().h(), q);
    c.C = cross_term(form, phi0);
    c.K = energy_value(form, p, pos_part(phi0).values());
    if (c.A > 0.0) c.tau0 = std::pow(q * c.B / (2.0 * c.A), 1.0 / (2.0 - q));
    const double scale = energy_scale(form, p, phi0);
    for (double tau : {0.0, 0.5, 1.0}) {
        const double direct = energy_value(form, p, sigma_path(phi0, tau).values());
        c.max_identity_error = std::max(c.max_identity_error, std::abs(direct - c.sigma_energy(tau, q)) / scale);
    }
    c.verified = c.max_identity_error <= 1e-10;
    return c;
}

PathProfile path_profile(const PathFn& path, const StiffnessForm& form, const EnergyParams& p, int n_samples,
                         const BoundFn& bound) {
    if (n_samples < 11) throw Error(ErrorKind::InvalidArgument, "need at least 11 path samples");
    PathProfile prof;
    prof.max_energy = -std::numeric_limits<double>::infinity();
    prof.bound_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_samples; ++k) {
        const double tau = static_cast<double>(k) / (n_samples - 1);
        const GridFunction phi = path(tau);
        const double e = energy_value(form, p, phi.values());
        prof.taus.push_back(tau);
        prof.energies.push_back(e);
        prof.max_energy = std::max(prof.max_energy, e);
        if (bound) {
            const double b = bound(tau);
            prof.bounds.push_back(b);
            prof.bound_value = std::max(prof.bound_value, b);
            if (e > b + 1e-10 * energy_scale(form, p, phi)) prof.bound_holds = false;
        }
    }
    if (!bound) prof.bound_value = std::numeric_limits<double>::quiet_NaN();
    return prof;
}

PathProfile gamma_profile(const StiffnessForm& form, const EnergyParams& p, const GridFunction& w,
                          const GridFunction& phi_plus, int n_samples) {
    const double fw = energy_value(form, p, w.values());
    const double fp = energy_value(form, p, phi_plus.values());
    return path_profile([&](double tau) { return gamma_path(w, phi_plus, tau, p.q()); }, form, p, n_samples,
                        [&](double tau) { return (1.0 - tau) * fw + tau * fp; });
}

PathProfile sigma_profile(const StiffnessForm& form, const EnergyParams& p, const GridFunction& phi0, int n_samples) {
    const HCoeffs c = h_coeffs(form, p, phi0);
    return path_profile([&](double tau) { return sigma_path(phi0, tau); }, form, p, n_samples,
                        [&](double tau) { return c.sigma_energy(tau, p.q()); });
}

std::vector<double> seminorm_second_differences(const StiffnessForm& form, const GridFunction& a,
                                                const GridFunction& b, double q, int n_samples) {
    if (n_samples < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 samples");
    std::vector<double> semi;
    for (int k = 0; k < n_samples; ++k) {
        const double tau = static_cast<double>(k) / (n_samples - 1);
        semi.push_back(0.5 * seminorm_sq(form, gamma_path(a, b, tau, q)));
    }
    std::vector<double> second;
    for (std::size_t k = 1; k + 1 < semi.size(); ++k) second.push_back(semi[k + 1] - 2.0 * semi[k] + semi[k - 1]);
    return second;
}

SaddleEstimate string_method(const StiffnessForm& form, const EnergyParams& p, const GridFunction& w,
                             const StringOptions& options) {
    if (options.n_images < 16) throw Error(ErrorKind::InvalidArgument, "string method needs at least 16 images");
    require_same_grid(form.grid(), w.grid());
    const Grid& grid = form.grid();
    const double h = grid.h();
    const double q = p.q();
    const double alpha = p.alpha();
    const Eigen::Index N = options.n_images;
    const double L = options.lipschitz > 0.0 ? options.lipschitz : spectral_bound(form);
    const double scale = energy_scale(form, p, w);

    Eigen::VectorXd bend(grid.n());
    for (int i = 0; i < grid.n(); ++i) bend[i] = w[i] * (2.0 * (grid.node(i) - grid.a()) / grid.length() - 1.0);
    Eigen::MatrixXd phi(grid.n(), N);
    for (Eigen::Index k = 0; k < N; ++k) {
        const double tau = static_cast<double>(k) / static_cast<double>(N - 1);
        phi.col(k) = (1.0 - 2.0 * tau) * w.values() + options.perturbation * std::sin(M_PI * tau) * bend;
    }
    phi.col(0) = w.values();
    phi.col(N - 1) = -w.values();

    Eigen::VectorXd energies = Eigen::VectorXd::Constant(N, std::numeric_limits<double>::quiet_NaN());
    Eigen::MatrixXd Aphi(grid.n(), N);
    int iterations = 0;
    bool converged = false;
    Eigen::Index top = 1;
    for (int it = 0; it < options.max_iter; ++it) {
        iterations = it + 1;
        Aphi.noalias() = form.matrix() * phi;
        const Eigen::MatrixXd nonlinear = phi.unaryExpr([q](double t) { return signed_pow(t, q - 2.0); });
        Eigen::VectorXd next(N);
        for (Eigen::Index k = 0; k < N; ++k) {
            next[k] = 0.5 * phi.col(k).dot(Aphi.col(k)) - alpha / q * lumped_power_sum(phi.col(k), h, q);
        }
        const double change = (next - energies).cwiseAbs().maxCoeff();
        energies = next;
        energies.segment(1, N - 2).maxCoeff(&top);
        top += 1;
        if (it > 0 && change <= options.energy_tol * scale && (!options.climbing || it > options.climb_after)) {
            converged = true;
            break;
        }

        Eigen::MatrixXd grad = Aphi - alpha * h * nonlinear;
        const bool climb = options.climbing && it >= options.climb_after;
        if (climb) {
            Eigen::VectorXd tangent = phi.col(top + 1) - phi.col(top - 1);
            const double norm = tangent.norm();
            if (norm > 0.0) {
                tangent /= norm;
                grad.col(top) -= 2.0 * grad.col(top).dot(tangent) * tangent;
            }
        }
        phi.middleCols(1, N - 2) -= (1.0 / L) * grad.middleCols(1, N - 2);
        if (climb) {
            reparametrize(phi, 0, top);
            reparametrize(phi, top, N - 1);
        } else {
            reparametrize(phi, 0, N - 1);
        }
    }

    SaddleEstimate est;
    for (Eigen::Index k = 0; k < N; ++k) {
        est.images.emplace_back(grid, phi.col(k));
        est.energies.push_back(energies[k]);
    }
    est.saddle_index = static_cast<int>(top);
    est.lambda_star = energies[top];
    est.saddle_residual = critical_residual(form, p, est.images[static_cast<std::size_t>(top)]);
    est.iterations = iterations;
    est.converged = converged;
    return est;
}

}  // namespace fpme
