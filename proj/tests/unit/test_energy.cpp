#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fpme/energy.hpp"
#include "fpme/error.hpp"
#include "fpme/laneemden.hpp"

#include <cmath>
#include <random>

using namespace fpme;

namespace {

struct Fixture {
    Grid grid = make_grid(-1.0, 1.0, 128);
    EnergyParams params{0.5, 2.0, 1.0};
    StiffnessForm form = assemble_form(grid, 0.5);
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

GridFunction random_function(const Grid& g, std::mt19937_64& rng, double amplitude = 1.0) {
    std::normal_distribution<double> normal(0.0, amplitude);
    Eigen::VectorXd v(g.n());
    for (auto& x : v) x = normal(rng);
    return GridFunction(g, v);
}

}  // namespace

TEST_CASE("energy examples") {
    const auto& f = fixture();
    const EnergyBreakdown zero = energy(f.form, f.params, GridFunction(f.grid));
    CHECK(zero.total == 0.0);
    CHECK(zero.cross == 0.0);

    std::mt19937_64 rng(3);
    const GridFunction phi = random_function(f.grid, rng);
    const EnergyBreakdown e = energy(f.form, f.params, phi);
    CHECK(std::abs(e.total - (e.seminorm_half - e.potential)) <= 1e-12 * std::abs(e.total));
    CHECK(e.seminorm_half == doctest::Approx(0.5 * seminorm_sq(f.form, phi)).epsilon(1e-14));
    CHECK(energy(f.form, f.params, -phi).total == e.total);

    const GridFunction bump = GridFunction::sample(f.grid, [](double x) { return 1.0 - x * x; });
    CHECK(energy(f.form, f.params, 1e-3 * bump).total < 0.0);

    CHECK_THROWS_AS(energy(f.form, EnergyParams(0.6, 2.0, 1.0), phi), Error);
}

TEST_CASE("decomposition identity and cross term") {
    const auto& f = fixture();
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const GridFunction phi = random_function(f.grid, rng, 1.0 + trial);
        const double total = energy(f.form, f.params, phi).total;
        const double parts = energy(f.form, f.params, pos_part(phi)).total +
                             energy(f.form, f.params, neg_part(phi)).total + cross_term(f.form, phi);
        const double scale = energy_scale(f.form, f.params, phi);
        CHECK(std::abs(total - parts) <= 1e-12 * scale);
        CHECK(cross_term(f.form, phi) > 0.0);
        const EnergyBreakdown e = energy(f.form, f.params, phi);
        CHECK(e.cross >= -1e-12 * scale);
        CHECK(energy(f.form, f.params, -phi).seminorm_half == e.seminorm_half);
        CHECK(energy(f.form, f.params, -phi).potential == e.potential);
        CHECK(energy(f.form, f.params, -phi).cross == doctest::Approx(e.cross).epsilon(1e-14));
    }
    const GridFunction positive = GridFunction::sample(f.grid, [](double x) { return 2.0 + x; });
    CHECK(cross_term(f.form, positive) == 0.0);
}

TEST_CASE("criticality and Nehari residuals") {
    const auto& f = fixture();
    CHECK(critical_residual(f.form, f.params, GridFunction(f.grid)) == 0.0);
    const NehariResidual z = nehari_residual(f.form, f.params, GridFunction(f.grid));
    CHECK(z.r1 == 0.0);
    CHECK(z.r2 == 0.0);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) CHECK(nehari_residual(f.form, f.params, random_function(f.grid, rng)).r2 > 1e-3);
}

TEST_CASE("coercivity constant") {
    const EnergyParams p(0.5, 2.0, 1.0);  // q = 3/2
    CHECK(coercivity_constant(p, 2.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    const EnergyParams p2(0.5, 2.0, 2.0);
    CHECK(coercivity_constant(p2, 2.0) == doctest::Approx(std::pow(2.0, 4.0) / 6.0).epsilon(1e-13));
    CHECK(coercivity_constant(EnergyParams(0.5, 1.0 + 1e-6, 1.0), 2.0) < 1e-5);
    CHECK_THROWS_AS(coercivity_constant(p, 0.0), Error);

    const auto& f = fixture();
    const double l1 = lambda1(f.form, f.params.q()).lambda1;
    const double C = coercivity_constant(f.params, l1);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        GridFunction phi = random_function(f.grid, rng);
        const double target = 1e3 * std::pow(unif(rng), 3.0);  // favour small seminorms
        phi = (target / std::sqrt(seminorm_sq(f.form, phi))) * phi;
        const double semi = seminorm_sq(f.form, phi);
        if (energy(f.form, f.params, phi).total < 0.25 * semi - C) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("appendix inequalities: examples") {
    CHECK(bregman_gap(0.7, 0.7, 2.0).lhs == 0.0);
    CHECK(bregman_gap(0.7, 0.7, 2.0).rhs == 0.0);
    CHECK(bregman_constant(3.0) == 1.0 / 64.0);
    const InequalitySides b = bregman_gap(1.0, 0.0, 2.0);
    CHECK(b.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(b.rhs == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
    CHECK(b.holds());

    const InequalitySides eq = midpoint_gap(-1.3, -1.3, 2.5);
    CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-15));
    const InequalitySides m1 = midpoint_gap(1.0, -1.0, 2.0);
    CHECK(m1.lhs == 1.0);
    CHECK(m1.rhs == 0.5);
    const InequalitySides m2 = midpoint_gap(2.0, 0.0, 3.0);
    CHECK(m2.lhs == 8.0);
    CHECK(m2.rhs == 3.0);
}

TEST_CASE("appendix inequalities: random sampling") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (double m : {1.5, 2.0, 3.0, 5.0}) {
        int bregman_fail = 0;
        int midpoint_fail = 0;
        for (int k = 0; k < 100000; ++k) {
            const double a = unif(rng);
            const double b = unif(rng);
            if (!bregman_gap(a, b, m).holds()) ++bregman_fail;
            if (!midpoint_gap(a, b, m).holds()) ++midpoint_fail;
        }
        CAPTURE(m);
        CHECK(bregman_fail == 0);
        CHECK(midpoint_fail == 0);
    }
}

TEST_CASE("s to one diagnostic") {
    const Grid g = make_grid(0.0, 1.0, 128);
    const auto table = s_to_one_diagnostic(g, [](double x) { return std::sin(2.0 * M_PI * x); }, {0.6, 0.75, 0.9, 0.95});
    REQUIRE(table.size() == 4);
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table[i].second >= 0.0);
        if (i > 0) CHECK(table[i].second < table[i - 1].second);
    }
    const auto positive = s_to_one_diagnostic(g, [](double x) { return x * (1.0 - x); }, {0.5, 0.9});
    for (const auto& row : positive) CHECK(row.second == 0.0);
}
