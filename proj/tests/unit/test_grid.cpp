#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fpme/error.hpp"
#include "fpme/grid.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace fpme;

TEST_CASE("make_grid spacing and nodes") {
    const Grid g = make_grid(0.0, 1.0, 9);
    CHECK(g.h() == doctest::Approx(0.1).epsilon(1e-15));
    const auto x = g.nodes();
    REQUIRE(x.size() == 9);
    CHECK(x.front() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(x.back() == doctest::Approx(0.9).epsilon(1e-15));
    for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);

    CHECK(make_grid(0.0, 2.0, 255).h() == 0.0078125);
}

TEST_CASE("make_grid rejects invalid domains") {
    auto kind_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Io;
    };
    CHECK(kind_of([] { make_grid(-1.0, 1.0, 3); }) == ErrorKind::InvalidDomain);
    CHECK(kind_of([] { make_grid(1.0, 1.0, 16); }) == ErrorKind::InvalidDomain);
    CHECK(kind_of([] { make_grid(2.0, 1.0, 16); }) == ErrorKind::InvalidDomain);
}

TEST_CASE("lumped lp norm") {
    const Grid g = make_grid(0.0, 1.0, 99);
    CHECK(lp_norm(GridFunction(g), 2.0) == 0.0);
    const auto one = GridFunction::sample(g, [](double) { return 1.0; });
    CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(0.99)).epsilon(1e-14));

    // exact integral of sin^2(pi x) over (0,1) is 1/2
    const Grid fine = make_grid(0.0, 1.0, 511);
    const auto sine = GridFunction::sample(fine, [](double x) { return std::sin(std::numbers::pi * x); });
    CHECK(std::abs(lp_norm(sine, 2.0) - std::sqrt(0.5)) < 1e-3);

    CHECK_THROWS_AS(lp_norm(one, 0.5), Error);
}

TEST_CASE("pointwise nonlinearities") {
    const Grid g = make_grid(0.0, 1.0, 8);
    auto constant = [&](double c) { return GridFunction::sample(g, [c](double) { return c; }); };

    CHECK(phi_map(constant(-3.0), 2.0)[0] == doctest::Approx(-9.0));
    CHECK(phi_map(GridFunction(g), 2.0)[3] == 0.0);
    CHECK(phi_map(constant(2.0), 3.0)[0] == doctest::Approx(8.0));
    CHECK(phi_inv(constant(8.0), 4.0 / 3.0)[0] == doctest::Approx(2.0));

    CHECK(g_map(constant(4.0), 2.0)[0] == doctest::Approx(8.0));
    CHECK(g_map(GridFunction(g), 2.0)[0] == 0.0);
    CHECK(g_map(constant(-2.0), 3.0)[0] == doctest::Approx(-4.0));
}

TEST_CASE("positive and negative parts") {
    const Grid g = make_grid(0.0, 1.0, 8);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    v[0] = 1.0;
    v[1] = -2.0;
    const GridFunction f(g, v);
    CHECK(pos_part(f)[0] == 1.0);
    CHECK(pos_part(f)[1] == 0.0);
    CHECK(neg_part(f)[0] == 0.0);
    CHECK(neg_part(f)[1] == 2.0);
    CHECK(neg_part(pos_part(f)).values().isZero());
}

TEST_CASE("property: Phi round trip, monotonicity, parts") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> logmag(-6.0, 6.0);
    std::uniform_int_distribution<int> coin(0, 1);
    const Grid g = make_grid(-1.0, 1.0, 64);
    for (double m : {1.5, 2.0, 3.0, 5.0}) {
        const double q = (m + 1.0) / m;
        Eigen::VectorXd v(g.n());
        for (int i = 0; i < g.n(); ++i) v[i] = (coin(rng) ? 1.0 : -1.0) * std::pow(10.0, logmag(rng));
        const GridFunction f(g, v);
        const GridFunction p = phi_map(f, m);
        const GridFunction back = phi_inv(p, q);
        for (int i = 0; i < g.n(); ++i) {
            CHECK(std::abs(back[i] - f[i]) <= 1e-12 * std::abs(f[i]));
            // |Phi(u)|^q = |u|^(m+1)
            const double lhs = std::pow(std::abs(p[i]), q);
            const double rhs = std::pow(std::abs(f[i]), m + 1.0);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
        }
        // odd and strictly increasing
        std::vector<double> sorted(v.data(), v.data() + v.size());
        std::sort(sorted.begin(), sorted.end());
        Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(sorted.data(), g.n());
        const GridFunction ps = phi_map(GridFunction(g, sv), m);
        for (int i = 1; i < g.n(); ++i) CHECK(ps[i] > ps[i - 1]);
        CHECK((phi_map(-f, m).values() + p.values()).isZero(0.0));

        const GridFunction pp = pos_part(f);
        const GridFunction np = neg_part(f);
        CHECK((pp.values() - np.values() - f.values()).isZero(0.0));
        CHECK((pp.values().cwiseProduct(np.values())).isZero(0.0));
        CHECK(lp_norm(f, 2.0) > 0.0);
    }
}

TEST_CASE("csv round trip keeps full precision") {
    const Grid g = make_grid(-1.0, 1.0, 16);
    const auto f = GridFunction::sample(g, [](double x) { return std::exp(x) / 3.0; });
    const auto path = std::filesystem::temp_directory_path() / "fpme_test_grid.csv";
    write_csv(path, f);
    const GridFunction back = read_csv(path, g);
    CHECK((back.values() - f.values()).isZero(0.0));
    CHECK_THROWS_AS(read_csv(path, make_grid(-1.0, 1.0, 17)), Error);
    std::filesystem::remove(path);
}
