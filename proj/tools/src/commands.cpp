#include "fpme/cli/commands.hpp"

#include "fpme/asymptotics.hpp"
#include "fpme/cli/datum.hpp"
#include "fpme/cli/manifest.hpp"
#include "fpme/cli/plot.hpp"
#include "fpme/energy.hpp"
#include "fpme/error.hpp"
#include "fpme/frlap.hpp"
#include "fpme/io.hpp"
#include "fpme/landscape.hpp"
#include "fpme/laneemden.hpp"
#include "fpme/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

namespace fpme::cli {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Problem {
    explicit Problem(const RunConfig& c)
        : grid(make_grid(c.a, c.b, c.n)),
          params(c.s, c.m, c.alpha),
          form(assemble_form(grid, c.s, c.quad_order)) {}
    Grid grid;
    EnergyParams params;
    StiffnessForm form;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values) {
        if (!row.empty()) row += ',';
        row += format_double(v);
    }
    return row + '\n';
}

std::string snapshot_name(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_t%g.csv", t);
    return buf;
}

GridFunction initial_datum(const RunConfig& c, const GridFunction& w) {
    const DatumSpec spec = parse_datum(c.datum);
    try {
        return make_datum(spec, w, c.m);
    } catch (const Error& e) {
        throw ConfigError("datum `" + c.datum + "`: " + e.what());
    }
}

GroundState solve_ground(const Problem& pb, RunManifest& manifest) {
    GroundState gs = ground_state(pb.form, pb.params);
    manifest.headline("lambda1", gs.lambda1);
    manifest.headline("Lambda1", gs.Lambda1);
    return gs;
}

void record_ground(RunManifest& manifest, const GroundState& gs, const EnergyParams& p, const Tolerances& tols) {
    manifest.record("nehari_r1", gs.nehari.r1 <= tols.nehari, gs.nehari.r1, tols.nehari);
    manifest.record("nehari_r2", gs.nehari.r2 <= tols.nehari, gs.nehari.r2, tols.nehari);
    const double closed = std::abs(gs.Lambda1 - minimal_level(p, gs.lambda1)) / std::abs(gs.Lambda1);
    manifest.record("closed_form_Lambda1", closed <= tols.closed_form, closed, tols.closed_form);
}

void write_ledger(const std::filesystem::path& dir, const RunLedger& led) {
    std::string csv = "t,energy,cum_dissipation,dist_plus,dist_minus,mass\n";
    for (std::size_t k = 0; k < led.times.size(); ++k) {
        csv += csv_row({led.times[k], led.energies[k], led.cum_dissipation[k], led.dist_plus[k], led.dist_minus[k],
                        led.mass[k]});
    }
    write_text_atomic(dir / "ledger.csv", csv);
    for (const auto& [t, v] : led.snapshots) write_csv(dir / snapshot_name(t), v);
}

void record_ledger(RunManifest& manifest, const RunLedger& led, const Tolerances& tols) {
    manifest.record("run_complete", led.complete, static_cast<double>(led.times.size()), 0.0);
    manifest.record("lyapunov", led.lyapunov_ok && led.max_energy_increase <= tols.lyapunov, led.max_energy_increase,
                    tols.lyapunov);
    manifest.record("eed", led.eed_ok, led.max_eed_excess, 1e-9);
    manifest.record("step_residual", led.max_inner_residual <= tols.step_residual, led.max_inner_residual,
                    tols.step_residual);
    if (!led.failure.empty()) manifest.set_failure(led.failure);
    manifest.headline("steps", static_cast<int>(led.times.size()) - 1);
    if (!led.times.empty()) {
        manifest.headline("final_time", led.times.back());
        manifest.headline("final_energy", led.energies.back());
        manifest.headline("final_dist_plus", led.dist_plus.back());
        manifest.headline("final_dist_minus", led.dist_minus.back());
    }
    manifest.headline("max_inner_iterations", led.max_inner_iterations);
}

json verdict_json(const Verdict& v) {
    return json{{"converged", v.converged},
                {"sign", v.sign},
                {"final_distance", number(v.final_distance)},
                {"plateau_energy", number(v.plateau_energy)},
                {"plateau_gap", number(v.plateau_gap)},
                {"plateau_ok", v.plateau_ok},
                {"energy_drift", number(v.energy_drift)}};
}

RunLedger run_evolution(const Problem& pb, const RunConfig& c, const GroundState& gs, const GridFunction& u0) {
    EvolveOptions opt;
    opt.snapshot_times = c.snapshots.empty() ? std::vector<double>{0.0, c.T} : c.snapshots;
    opt.ground = gs;
    opt.step.residual_tol = c.tols.step_residual;
    return evolve(pb.form, pb.params, u0, c.h, c.T, opt);
}

StabilizationOptions stabilization_options(const RunConfig& c) {
    StabilizationOptions so;
    so.tol = c.tol;
    so.window = c.window;
    return so;
}

int finish(const RunManifest& manifest, const RunConfig& c, Clock::time_point start, bool solver_ok) {
    manifest.write(c.output_dir / "manifest.json", seconds_since(start));
    if (!solver_ok) return kSolverFailure;
    return manifest.all_passed() ? kSuccess : kInvariantViolation;
}

void maybe_plot(const RunConfig& c) {
    if (c.plot) emit_plot_script(c.output_dir);
}

// Sampled invariants shared by `check`.
struct Sampled {
    double worst = 0.0;
    bool passed = true;
};

Sampled decomposition_battery(const Problem& pb, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Sampled out;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd v(pb.grid.n());
        for (auto& x : v) x = normal(rng);
        const GridFunction phi(pb.grid, v);
        const double full = seminorm_sq(pb.form, phi);
        const double parts = seminorm_sq(pb.form, pos_part(phi)) + seminorm_sq(pb.form, neg_part(phi)) +
                             2.0 * cross_term(pb.form, phi);
        const double rel = std::abs(full - parts) / std::max(1.0, full);
        out.worst = std::max(out.worst, rel);
    }
    out.passed = out.worst <= 1e-12;
    return out;
}

Sampled convexity_battery(const Problem& pb, const GroundState& gs, std::mt19937_64& rng, double tol) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto nonnegative = [&] {
        Eigen::VectorXd v(pb.grid.n());
        const double c = unif(rng);
        for (int i = 0; i < pb.grid.n(); ++i) v[i] = unif(rng) * (1.0 + std::sin(5.0 * c * pb.grid.node(i)));
        return GridFunction(pb.grid, v);
    };
    Sampled out;
    out.worst = std::numeric_limits<double>::infinity();
    auto consider = [&](const GridFunction& a, const GridFunction& b) {
        const auto second = seminorm_second_differences(pb.form, a, b, pb.params.q(), 101);
        out.worst = std::min(out.worst, *std::min_element(second.begin(), second.end()));
    };
    consider(gs.w, 2.0 * gs.w);
    for (int pair = 0; pair < 10; ++pair) {
        const GridFunction a = nonnegative();
        consider(a, nonnegative());
    }
    out.passed = out.worst >= -tol;
    return out;
}

Sampled sigma_battery(const Problem& pb, const GroundState& gs, std::uint64_t seed) {
    Sampled out;
    for (int k = 0; k < 5; ++k) {
        const GridFunction bend = random_sine_mix(pb.grid, seed + static_cast<std::uint64_t>(k), 1.0);
        const GridFunction phi0 = gs.w - GridFunction(pb.grid, gs.w.values().maxCoeff() * bend.values());
        const HCoeffs hc = h_coeffs(pb.form, pb.params, phi0);
        out.worst = std::max(out.worst, hc.max_identity_error);
        out.passed = out.passed && hc.verified;
    }
    return out;
}

}  // namespace

int cmd_ground_state(const RunConfig& c) {
    const auto start = Clock::now();
    RunManifest manifest("ground-state", c);
    const Problem pb(c);
    const GroundState gs = solve_ground(pb, manifest);
    record_ground(manifest, gs, pb.params, c.tols);
    manifest.record("critical_residual", gs.residual <= c.tols.nehari, gs.residual, c.tols.nehari);
    const UniquenessReport uq = verify_uniqueness(pb.form, pb.params, c.uniqueness_trials, c.seed);
    const double threshold = c.tols.uniqueness * gs.w.values().cwiseAbs().maxCoeff();
    manifest.record("uniqueness", uq.max_distance <= threshold, uq.max_distance, threshold);

    write_csv(c.output_dir / "ground_state.csv", gs.w);
    const json record{{"lambda1", gs.lambda1},
                      {"Lambda1", gs.Lambda1},
                      {"residuals",
                       {{"critical", gs.residual}, {"nehari_r1", gs.nehari.r1}, {"nehari_r2", gs.nehari.r2}}},
                      {"iterations", gs.iterations}};
    write_text_atomic(c.output_dir / "ground_state.json", record.dump(2) + "\n");
    manifest.headline("iterations", gs.iterations);
    return finish(manifest, c, start, true);
}

int cmd_evolve(const RunConfig& c) {
    const auto start = Clock::now();
    RunManifest manifest("evolve", c);
    const Problem pb(c);
    const GroundState gs = solve_ground(pb, manifest);
    const GridFunction u0 = initial_datum(c, gs.w);
    const RunLedger led = run_evolution(pb, c, gs, u0);
    write_ledger(c.output_dir, led);
    record_ledger(manifest, led, c.tols);
    if (led.complete) {
        const Verdict v = detect_stabilization(led, stabilization_options(c));
        manifest.headline("verdict", verdict_json(v));
    }
    maybe_plot(c);
    return finish(manifest, c, start, led.complete);
}

int cmd_selection(const RunConfig& c) {
    const auto start = Clock::now();
    RunManifest manifest("selection", c);
    const Problem pb(c);
    const GroundState gs = solve_ground(pb, manifest);
    const GridFunction u0 = initial_datum(c, gs.w);

    double lambda_star = std::numeric_limits<double>::quiet_NaN();
    double lambda2 = 0.0;
    if (c.lambda2_est) {
        lambda2 = *c.lambda2_est;
    } else {
        StringOptions so;
        so.n_images = c.n_images;
        so.energy_tol = c.tols.string_energy;
        lambda_star = string_method(pb.form, pb.params, gs.w, so).lambda_star;
        lambda2 = default_lambda2_estimate(lambda_star);
    }
    const Selection sel = selection_predict(pb.form, pb.params, u0, lambda2);
    const RunLedger led = run_evolution(pb, c, gs, u0);
    write_ledger(c.output_dir, led);
    record_ledger(manifest, led, c.tols);

    json out{{"prediction", sel.prediction}, {"branch", to_string(sel.branch)}};
    json numbers{{"energy_total", sel.energy_total},
                 {"energy_pos", sel.energy_pos},
                 {"energy_neg", sel.energy_neg},
                 {"cross", sel.cross},
                 {"lambda2_est", lambda2},
                 {"lambda_star", number(lambda_star)},
                 {"lambda1", gs.lambda1},
                 {"Lambda1", gs.Lambda1}};
    bool consistent = true;
    if (led.complete) {
        const Verdict v = detect_stabilization(led, stabilization_options(c));
        out["verdict"] = verdict_json(v);
        numbers["terminal_residual"] = terminal_residual(pb.form, pb.params, led);
        consistent = sel.prediction == 0 || v.sign == sel.prediction;
        manifest.headline("verdict", out["verdict"]);
        if (v.converged) {
            const double res = numbers["terminal_residual"].get<double>();
            manifest.record("terminal_residual", res <= c.tols.terminal, res, c.tols.terminal);
            manifest.record("plateau", v.plateau_gap <= c.tols.plateau, v.plateau_gap, c.tols.plateau);
        }
    } else {
        out["verdict"] = nullptr;
        consistent = false;
    }
    out["numbers"] = numbers;
    out["heuristic"] = {"lambda2_est", "prediction", "branch"};
    write_text_atomic(c.output_dir / "selection.json", out.dump(2) + "\n");

    manifest.record("prediction_consistent", consistent, static_cast<double>(sel.prediction), 0.0);
    manifest.headline("prediction", sel.prediction);
    manifest.headline("branch", to_string(sel.branch));
    manifest.heuristic("lambda2_est", lambda2);
    manifest.heuristic("lambda_star", number(lambda_star));
    manifest.heuristic("prediction", "selection criterion evaluated with lambda2_est in place of Lambda2");
    maybe_plot(c);
    return finish(manifest, c, start, led.complete);
}

int cmd_landscape(const RunConfig& c) {
    const auto start = Clock::now();
    RunManifest manifest("landscape", c);
    const Problem pb(c);
    const GroundState gs = solve_ground(pb, manifest);
    const GridFunction u0 = initial_datum(c, gs.w);
    const GridFunction phi0 = phi_map(u0, c.m);

    StringOptions so;
    so.n_images = c.n_images;
    so.energy_tol = c.tols.string_energy;
    const SaddleEstimate est = string_method(pb.form, pb.params, gs.w, so);
    const double lambda2 = c.lambda2_est ? *c.lambda2_est : default_lambda2_estimate(est.lambda_star);

    for (std::size_t k = 0; k < est.images.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "image_%03zu.csv", k);
        write_csv(c.output_dir / name, est.images[k]);
    }
    std::string images_csv = "index,energy\n";
    for (std::size_t k = 0; k < est.energies.size(); ++k) {
        images_csv += std::to_string(k) + "," + format_double(est.energies[k]) + "\n";
    }
    write_text_atomic(c.output_dir / "string_energies.csv", images_csv);

    auto profile_csv = [](const PathProfile& prof) {
        std::string csv = "tau,energy,bound\n";
        for (std::size_t k = 0; k < prof.taus.size(); ++k) {
            const double bound = k < prof.bounds.size() ? prof.bounds[k] : std::nan("");
            csv += format_double(prof.taus[k]) + "," + format_double(prof.energies[k]) + "," +
                   (std::isfinite(bound) ? format_double(bound) : std::string()) + "\n";
        }
        return csv;
    };

    const PathProfile sigma = sigma_profile(pb.form, pb.params, phi0, 101);
    write_text_atomic(c.output_dir / "profile.csv", profile_csv(sigma));
    double sigma_err = 0.0;
    for (std::size_t k = 0; k < sigma.taus.size(); ++k) {
        sigma_err = std::max(sigma_err, std::abs(sigma.energies[k] - sigma.bounds[k]));
    }
    sigma_err /= energy_scale(pb.form, pb.params, phi0);

    bool convex_ok = true;
    double convex_worst = 0.0;
    const GridFunction phi_plus = pos_part(phi0);
    if (phi_plus.values().maxCoeff() > 0.0) {
        const PathProfile gamma = gamma_profile(pb.form, pb.params, gs.w, phi_plus, 101);
        write_text_atomic(c.output_dir / "gamma_profile.csv", profile_csv(gamma));
        const auto second = seminorm_second_differences(pb.form, gs.w, phi_plus, pb.params.q(), 101);
        convex_worst = *std::min_element(second.begin(), second.end());
        convex_ok = gamma.bound_holds && convex_worst >= -c.tols.convexity;
    }

    const json record{{"lambda_star", est.lambda_star},
                      {"saddle_index", est.saddle_index},
                      {"saddle_residual", est.saddle_residual},
                      {"iterations", est.iterations},
                      {"converged", est.converged},
                      {"Lambda1", gs.Lambda1},
                      {"lambda2_est", lambda2},
                      {"heuristic", {"lambda2_est"}}};
    write_text_atomic(c.output_dir / "landscape.json", record.dump(2) + "\n");

    manifest.record("string_converged", est.converged, static_cast<double>(est.iterations), 0.0);
    manifest.record("saddle_residual", est.saddle_residual <= c.tols.saddle, est.saddle_residual, c.tols.saddle);
    manifest.record("saddle_above_ground", est.lambda_star > gs.Lambda1, est.lambda_star - gs.Lambda1, 0.0);
    manifest.record("saddle_below_zero", est.lambda_star <= 1e-8, est.lambda_star, 1e-8);
    manifest.record("sigma_identity", sigma_err <= 1e-10, sigma_err, 1e-10);
    manifest.record("gamma_convexity", convex_ok, convex_worst, c.tols.convexity);
    manifest.headline("lambda_star", est.lambda_star);
    manifest.headline("saddle_index", est.saddle_index);
    manifest.headline("saddle_residual", est.saddle_residual);
    manifest.heuristic("lambda2_est", lambda2);
    maybe_plot(c);
    return finish(manifest, c, start, true);
}

int cmd_check(const RunConfig& c) {
    const auto start = Clock::now();
    RunManifest manifest("check", c);

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    const double ms[] = {1.5, 2.0, 3.0, 5.0};
    std::string csv = "case,a,b,m,lhs,rhs,pass\n";
    csv.reserve(static_cast<std::size_t>(c.samples) * 200);
    int bregman_fail = 0;
    int midpoint_fail = 0;
    for (int k = 0; k < c.samples; ++k) {
        const double a = unif(rng);
        const double b = unif(rng);
        const double m = ms[k % 4];
        const InequalitySides br = bregman_gap(a, b, m);
        const InequalitySides mid = midpoint_gap(a, b, m);
        bregman_fail += br.holds() ? 0 : 1;
        midpoint_fail += mid.holds() ? 0 : 1;
        auto line = [&](const char* name, const InequalitySides& side) {
            csv += name;
            csv += ',' + format_double(a) + ',' + format_double(b) + ',' + format_double(m) + ',' +
                   format_double(side.lhs) + ',' + format_double(side.rhs) + ',' + (side.holds() ? "1" : "0") + '\n';
        };
        line("bregman", br);
        line("midpoint", mid);
    }
    write_text_atomic(c.output_dir / "check.csv", csv);
    manifest.record("bregman_gap", bregman_fail == 0, bregman_fail, 0.0);
    manifest.record("midpoint_gap", midpoint_fail == 0, midpoint_fail, 0.0);

    const Problem pb(c);
    const MStructureReport ms_rep = check_m_structure(pb.form);
    manifest.record("m_structure", ms_rep.passed(), ms_rep.max_offdiag, ms_rep.tolerance);

    std::mt19937_64 battery_rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
    const Sampled dec = decomposition_battery(pb, battery_rng);
    manifest.record("decomposition_identity", dec.passed, dec.worst, 1e-12);

    const GroundState gs = solve_ground(pb, manifest);
    const Sampled conv = convexity_battery(pb, gs, battery_rng, c.tols.convexity);
    manifest.record("hidden_convexity", conv.passed, conv.worst, c.tols.convexity);
    const Sampled sig = sigma_battery(pb, gs, c.seed);
    manifest.record("sigma_identity", sig.passed, sig.worst, 1e-10);
    record_ground(manifest, gs, pb.params, c.tols);

    std::string inv_csv = "invariant,pass,value,tolerance\n";
    for (const auto& r : manifest.invariants()) {
        inv_csv += r.name + "," + (r.passed ? "1" : "0") + "," + format_double(r.value) + "," +
                   format_double(r.tolerance) + "\n";
    }
    write_text_atomic(c.output_dir / "invariants.csv", inv_csv);
    return finish(manifest, c, start, true);
}

int run_command(const std::string& name, const RunConfig& config) {
    try {
        if (name == "ground-state") return cmd_ground_state(config);
        if (name == "evolve") return cmd_evolve(config);
        if (name == "selection") return cmd_selection(config);
        if (name == "landscape") return cmd_landscape(config);
        if (name == "check") return cmd_check(config);
        std::cerr << "fpme: unknown command `" << name << "`\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "fpme: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << "fpme: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::InvalidDomain:
            case ErrorKind::InvalidArgument:
            case ErrorKind::StepTooLarge:
                return kConfigError;
            default:
                return kSolverFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "fpme: " << e.what() << "\n";
        return kSolverFailure;
    }
}

}  // namespace fpme::cli
