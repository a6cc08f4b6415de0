#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fpme/asymptotics.hpp"
#include "fpme/error.hpp"
#include "fpme/landscape.hpp"

#include <cmath>

using namespace fpme;

namespace {

struct Setup {
    Grid grid = make_grid(-1.0, 1.0, 128);
    EnergyParams params{0.5, 2.0, 1.0};
    StiffnessForm form = assemble_form(grid, 0.5);
    GroundState gs = ground_state(form, params);
    double lambda2_est = default_lambda2_estimate(string_method(form, params, gs.w).lambda_star);

    EvolveOptions options() const {
        EvolveOptions opt;
        opt.ground = gs;
        return opt;
    }
    GridFunction profile() const { return phi_inv(gs.w, params.q()); }
};

const Setup& setup() {
    static const Setup s;
    return s;
}

}  // namespace

TEST_CASE("omega distance") {
    const auto& s = setup();
    const GridFunction target = s.profile();
    const OmegaDistance at_plus = omega_distance(target, s.gs.w, 2.0);
    CHECK(at_plus.d_plus == 0.0);
    CHECK(at_plus.d_minus == doctest::Approx(2.0 * lp_norm(target, 3.0)).epsilon(1e-14));
    const OmegaDistance at_zero = omega_distance(GridFunction(s.grid), s.gs.w, 2.0);
    CHECK(at_zero.d_plus == at_zero.d_minus);
    CHECK(omega_distance(-target, s.gs.w, 2.0).d_minus == 0.0);
}

TEST_CASE("Friendly Giant") {
    const auto& s = setup();
    const GridFunction target = s.profile();
    CHECK((friendly_giant(s.gs.w, 1.0, s.params).values() - target.values()).isZero(0.0));
    for (double t : {0.3, 2.0, 17.0}) {
        const GridFunction st = friendly_giant(s.gs.w, t, s.params);
        const GridFunction s2t = friendly_giant(s.gs.w, 2.0 * t, s.params);
        CHECK((s2t.values() - std::pow(2.0, -s.params.alpha()) * st.values()).lpNorm<Eigen::Infinity>() <=
              1e-15 * st.values().maxCoeff());
        CHECK((std::pow(t, s.params.alpha()) * st.values() - target.values()).lpNorm<Eigen::Infinity>() <=
              1e-15 * target.values().maxCoeff());
    }
    CHECK_THROWS_AS(friendly_giant(s.gs.w, 0.0, s.params), Error);
    CHECK_THROWS_AS(friendly_giant(-s.gs.w, 1.0, s.params), Error);
}

TEST_CASE("stabilization verdicts") {
    const auto& s = setup();
    const RunLedger plus = evolve(s.form, s.params, s.profile(), 0.02, 5.0, s.options());
    const Verdict vp = detect_stabilization(plus);
    CHECK(vp.converged);
    CHECK(vp.sign == 1);
    CHECK(vp.plateau_ok);

    const RunLedger zero = evolve(s.form, s.params, GridFunction(s.grid), 0.02, 2.0, s.options());
    const Verdict vz = detect_stabilization(zero);
    CHECK_FALSE(vz.converged);
    CHECK(vz.sign == 0);
    CHECK(vz.plateau_energy == 0.0);

    const GridFunction u0 = bump_mix(s.gs.w, 0.008, -0.8, 0.4, 2.0);
    const RunLedger brief = evolve(s.form, s.params, u0, 0.02, 0.1, s.options());
    const Verdict vb = detect_stabilization(brief);
    CHECK_FALSE(vb.converged);
    CHECK(vb.sign == 0);

    RunLedger broken = brief;
    broken.complete = false;
    CHECK_THROWS_AS(detect_stabilization(broken), Error);
}

TEST_CASE("selection criterion examples") {
    const auto& s = setup();
    const double l2 = s.lambda2_est;
    REQUIRE(l2 < 0.0);
    REQUIRE(l2 > s.gs.Lambda1);

    const Selection nonneg = selection_predict(s.form, s.params, s.profile(), l2);
    CHECK(nonneg.prediction == 1);
    CHECK(nonneg.branch == Branch::Assnl2);
    CHECK(nonneg.cross == 0.0);
    CHECK(nonneg.energy_neg == 0.0);

    const Selection mirror = selection_predict(s.form, s.params, -s.profile(), l2);
    CHECK(mirror.prediction == 0);
    CHECK(mirror.branch == Branch::NotApplicable);
    CHECK(mirror.energy_neg == doctest::Approx(s.gs.Lambda1).epsilon(1e-12));

    // grow the opposite-sign bump until its energy turns positive
    double amp = 0.0;
    Selection sel;
    for (amp = 0.001; amp < 0.05; amp += 0.0005) {
        sel = selection_predict(s.form, s.params, bump_mix(s.gs.w, amp, -0.8, 0.4, 2.0), l2);
        if (sel.energy_neg > 0.0) break;
    }
    CHECK(sel.branch == Branch::Assnl1);
    CHECK(sel.prediction == 1);
    CHECK(sel.energy_total == doctest::Approx(sel.energy_pos + sel.energy_neg + sel.cross).epsilon(1e-10));

    CHECK(to_string(Branch::Assnl1) == "assnl1");
    CHECK(to_string(Branch::NotApplicable) == "not-applicable");
}

TEST_CASE("predicted data select +1 and mirrored data select -1") {
    const auto& s = setup();
    const std::vector<GridFunction> family{bump_mix(s.gs.w, 0.008, -0.8, 0.4, 2.0),
                                           bump_mix(s.gs.w, 0.013, 0.7, 0.4, 2.0),
                                           bump_mix(s.gs.w, 0.012, -0.8, 0.4, 2.0, 0.01)};
    std::vector<Branch> branches;
    for (const GridFunction& u0 : family) {
        const Selection sel = selection_predict(s.form, s.params, u0, s.lambda2_est);
        REQUIRE(sel.prediction == 1);
        branches.push_back(sel.branch);
        const RunLedger led = evolve(s.form, s.params, u0, 0.02, 15.0, s.options());
        const Verdict v = detect_stabilization(led);
        CHECK(v.converged);
        CHECK(v.sign == 1);
        CHECK(v.plateau_ok);
        CHECK(terminal_residual(s.form, s.params, led) <= 1e-4);
        const Verdict vm = detect_stabilization(evolve(s.form, s.params, -u0, 0.02, 15.0, s.options()));
        CHECK(vm.converged);
        CHECK(vm.sign == -1);
    }
    CHECK(std::count(branches.begin(), branches.end(), Branch::Assnl2) >= 1);
    CHECK(std::count(branches.begin(), branches.end(), Branch::Assnl1) >= 1);
}
