#include "doctest.h"

#include <cmath>
#include <vector>

#include "dkw/ecdf.hpp"
#include "dkw/errors.hpp"
#include "dkw/harness.hpp"
#include "dkw/lemma_checks.hpp"
#include "dkw/models.hpp"
#include "dkw/rng.hpp"
#include "oracles.hpp"

using namespace dkw;

namespace {

const double pi = 3.14159265358979323846;

// unit vectors at angle theta in the first two coordinates of R^d
std::pair<std::vector<double>, std::vector<double>> pair_at_angle(std::size_t d, double theta) {
    std::vector<double> x(d, 0.0), y(d, 0.0);
    x[0] = 1.0;
    y[0] = std::cos(theta);
    y[1] = std::sin(theta);
    return {x, y};
}

double angle_for_distance(double dist) {
    return 2.0*std::asin(dist/2.0);
}

} // namespace

TEST_CASE("pert1 with identical directions") {
    auto s = sample(vector_model::gaussian(3), 500, 1);
    std::vector<double> x{0.6, 0.0, 0.8};
    auto c = check_pert1(s, x, x, 0.2);
    CHECK(c.holds);
    CHECK(c.context.at("P_far") == 0.0);
    CHECK(c.context.at("Pm_far") == 0.0);
    CHECK(c.lhs == c.context.at("ks_y"));
    CHECK(c.slack == doctest::Approx(2*0.2/std::sqrt(2*pi)).epsilon(1e-14));
}

TEST_CASE("pert1 at distance 0.1 and r = 0.3 holds on every seed") {
    auto [x, y] = pair_at_angle(4, angle_for_distance(0.1));
    // independent value of P(|N(0, 0.1^2)| >= 0.3)
    double p_far = static_cast<double>(2*(1 - oracle::normal_cdf(3.0L)));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = sample(vector_model::gaussian(4), 1000, trial_seed(7, seed));
        auto c = check_pert1(s, x, y, 0.3);
        REQUIRE(c.holds);
        CHECK(c.context.at("distance") == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(c.context.at("P_far") == doctest::Approx(p_far).epsilon(1e-10));
        CHECK(c.context.at("D") == doctest::Approx(1/std::sqrt(2*pi)).epsilon(1e-14));
        CHECK(c.rhs == doctest::Approx(c.context.at("ks_y") + c.context.at("P_far") + c.context.at("Pm_far") +
                                       2*0.3*c.context.at("D")));
    }
}

TEST_CASE("pert1 with a huge radius holds vacuously") {
    auto s = sample(vector_model::gaussian(2), 50, 3);
    std::vector<double> x{1, 0}, y{0, 1};
    auto c = check_pert1(s, x, y, 1e6);
    CHECK(c.holds);
    CHECK(c.rhs > 1e5);
}

TEST_CASE("pert1 refuses non-exact laws") {
    auto s = sample(vector_model::product(laplace_law(), 3), 100, 2);
    std::vector<double> x{0.6, 0.48, 0.64}, y{0.0, 0.6, 0.8};
    CHECK_THROWS_AS(check_pert1(s, x, y, 0.1), configuration_error);
    auto g = sample(vector_model::gaussian(3), 100, 2);
    CHECK_THROWS_AS(check_pert1(g, x, y, 0.0), domain_error);
}

TEST_CASE("cont1 on gaussian samples") {
    auto law = normal_law();
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto s = sample(vector_model::gaussian(1), 1 + seed % 300, seed);
        auto col = s.column(0);
        auto c = check_cont1(build_ecdf(std::vector<double>(col.begin(), col.end())), law, 0.1);
        REQUIRE(c.holds);
    }
}

TEST_CASE("cont1 with a single observation") {
    auto law = normal_law();
    for (double x0: {-1.3, -0.2, 0.0, 0.4, 2.1}) {
        auto c = check_cont1(build_ecdf(std::vector<double>{x0}), law, 0.2);
        double u0 = static_cast<double>(oracle::normal_cdf(x0));
        CHECK(c.lhs == doctest::Approx(std::max(u0, 1 - u0)).epsilon(1e-12));
        CHECK(c.holds);
    }
}

TEST_CASE("cont1 on exact quantile points") {
    auto law = normal_law();
    for (std::size_t m: {4u, 10u, 100u}) {
        std::vector<double> x(m);
        for (std::size_t i = 0; i < m; ++i) x[i] = std_normal_quantile((i + 0.5)/static_cast<double>(m));
        auto c = check_cont1(build_ecdf(x), law, 0.05);
        CHECK(c.lhs == doctest::Approx(0.5/static_cast<double>(m)).epsilon(1e-9));
        CHECK(c.rhs >= 0.05);
        CHECK(c.holds);
    }
    CHECK_THROWS_AS(check_cont1(build_ecdf(std::vector<double>{0.0}), rademacher_law(), 0.1), configuration_error);
}

TEST_CASE("cont1 holds for every sample when 1/delta is an integer") {
    std::vector<law1d> laws = {normal_law(), laplace_law(), uniform_law(), pareto_law(2.5)};
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        splitmix_engine g(seed);
        double delta = 1.0/static_cast<double>(5 + g() % 200);
        auto x = sample_law(laws[seed % laws.size()], 1 + g() % 1500, g());
        auto c = check_cont1(build_ecdf(x), laws[seed % laws.size()], delta);
        CAPTURE(delta);
        REQUIRE(c.holds);
    }
}

TEST_CASE("cont1 fails when the top grid gap exceeds delta") {
    // delta slightly above 1/5: levels stop at 3 delta, leaving a gap of almost 2 delta below 1
    const double delta = 0.2001;
    CHECK(grid_levels(delta).size() == 3);
    const std::size_t m = 10000;
    const double top = static_cast<double>(oracle::normal_cdf(3.719L));
    std::vector<double> x;
    for (std::size_t i = 1; i <= 6003; ++i) x.push_back(std_normal_quantile((i - 0.5)/static_cast<double>(m)));
    x.insert(x.end(), m - 6003, 3.719);
    auto c = check_cont1(build_ecdf(x), normal_law(), delta);
    // just below the block of equal values: F_m = 0.6003, F = Phi(3.719)
    CHECK(c.lhs == doctest::Approx(top - 0.6003).epsilon(1e-9));
    CHECK(c.context.at("grid_deviation") <= 1.0/static_cast<double>(m));
    CHECK_FALSE(c.holds);
}

TEST_CASE("symmetric difference: identical and orthogonal directions") {
    auto model = vector_model::gaussian(3);
    std::vector<double> x{1, 0, 0}, y{0, 1, 0};
    auto same = check_symmetric_difference(model, x, x, 0.3, 0.1, 10000, 1);
    CHECK(same.lhs == 0.0);
    CHECK(same.holds);
    auto orth = check_symmetric_difference(model, x, y, 0.5, 0.5, 1000000, 2);
    CHECK(std::abs(orth.lhs - 0.5) <= orth.mc_tolerance);
    CHECK(orth.mc_tolerance == doctest::Approx(3*std::sqrt(orth.lhs*(1 - orth.lhs)/1e6) + 3e-6));
}

TEST_CASE("symmetric difference at the median matches theta over pi") {
    auto model = vector_model::gaussian(3);
    for (double dist: {0.05, 0.1, 0.2}) {
        double theta = angle_for_distance(dist);
        auto [x, y] = pair_at_angle(3, theta);
        double r = dist*std::log(std::exp(1.0)/dist);
        auto c = check_symmetric_difference(model, x, y, 0.5, r, 1000000, 9);
        CHECK(std::abs(c.lhs - theta/pi) <= c.mc_tolerance);
        CHECK(c.holds);
        CHECK(c.context.at("angle") == doctest::Approx(theta).epsilon(1e-12));
    }
    CHECK(angle_for_distance(0.2)/pi == doctest::Approx(0.06377).epsilon(1e-4));
}

TEST_CASE("symmetric difference shrinks to zero with the distance") {
    auto model = vector_model::gaussian(2);
    double prev = 1.0;
    for (double dist: {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125}) {
        auto [x, y] = pair_at_angle(2, angle_for_distance(dist));
        // same seed: common random numbers across the sequence
        auto c = check_symmetric_difference(model, x, y, 0.3, dist, 200000, 5);
        CHECK(c.lhs <= prev);
        prev = c.lhs;
    }
    CHECK(prev <= 0.01);
}

TEST_CASE("symmetric difference refuses laws without a density bound") {
    std::vector<double> x{0.6, 0.48, 0.64}, y{0.0, 0.6, 0.8};
    CHECK_THROWS_AS(check_symmetric_difference(vector_model::product(laplace_law(), 3), x, y, 0.5, 0.1, 100, 1),
                    configuration_error);
    std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
    CHECK_THROWS_AS(check_symmetric_difference(vector_model::product(rademacher_law(), 3), e1, e2, 0.5, 0.1, 100, 1),
                    configuration_error);
}

TEST_CASE("psi1 on light and heavy tails") {
    auto grid20 = uniform_grid(20.0, 0.01);
    CHECK(grid20.size() == 2001);
    CHECK(grid20.back() == doctest::Approx(20.0));
    CHECK(check_psi1(laplace_law(), 2.0, grid20).holds);
    CHECK(check_psi1(normal_law(), 1.1, grid20).holds);
    CHECK_FALSE(check_psi1(laplace_law(), 2.0, grid20).violating_t);

    auto grid50 = uniform_grid(50.0, 0.01);
    auto c = check_psi1(pareto_law(2.5), 2.0, grid50);
    CHECK_FALSE(c.holds);
    REQUIRE(c.violating_t);
    // independent tail: P(|Z| >= s) = (s/tmin)^(-5/2) beyond tmin
    const double tmin = std::sqrt(0.2);
    auto excess = [&](double t) { return std::pow(2*t/tmin, -2.5) - 2*std::exp(-t); };
    CHECK(excess(*c.violating_t + 1e-6) > 0);
    CHECK(excess(*c.violating_t - 1e-3) <= 0);
    CHECK(c.context.at("first_violating_t") == *c.violating_t);
}

TEST_CASE("campaigns: deterministic lemmas") {
    auto pert = run_campaign("pert1", 300, 17);
    REQUIRE(pert.size() == 300);
    for (const auto& c: pert) {
        CAPTURE(c.lhs);
        CAPTURE(c.rhs);
        REQUIRE(c.holds);
        REQUIRE(c.mc_tolerance == 0.0);
    }
    // cont1 failures are confined to a top grid gap wider than delta
    std::size_t failures = 0;
    for (const auto& c: run_campaign("cont1", 1000, 3)) {
        REQUIRE(c.mc_tolerance == 0.0);
        if (c.holds) continue;
        ++failures;
        double delta = c.context.at("delta");
        CHECK(1.0 - delta*static_cast<double>(grid_levels(delta).size()) > delta);
    }
    CHECK(failures == 2);
    auto psi = run_campaign("psi1", 10, 0);
    REQUIRE(psi.size() == 6);
    for (std::size_t i = 0; i < 4; ++i) CHECK(psi[i].holds);
    CHECK_FALSE(psi[4].holds);
    CHECK_FALSE(psi[5].holds);
    auto sd = run_campaign("symmetric_difference", 9, 3, 20000);
    for (const auto& c: sd) CHECK(c.holds);
    CHECK_THROWS_AS(run_campaign("nope", 1, 1), configuration_error);
}
