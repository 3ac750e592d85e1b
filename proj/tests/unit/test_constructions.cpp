#include "doctest.h"

#include <cmath>

#include "dkw/complexity.hpp"
#include "dkw/constructions.hpp"
#include "dkw/errors.hpp"

using namespace dkw;

namespace {

// Symmetric Pareto with variance 1, written out from the tail formula.
struct pareto_oracle {
    double kappa = 2.5;
    double tmin = std::sqrt((kappa - 2.0)/kappa);
    double cdf(double x) const {
        if (x <= -tmin) return 0.5*std::pow(-x/tmin, -kappa);
        if (x < tmin) return 0.5;
        return 1.0 - 0.5*std::pow(x/tmin, -kappa);
    }
    double quantile(double u) const {
        return u < 0.5 ? -tmin*std::pow(2.0*u, -1.0/kappa) : tmin*std::pow(2.0*(1.0 - u), -1.0/kappa);
    }
};

// P(a w1 + b w2 <= t) by midpoint rule over the level of w2.
double pareto_two_sparse_cdf(double a, double b, double t) {
    pareto_oracle p;
    const int n = 2000000;
    long double s = 0;
    for (int i = 0; i < n; ++i) {
        double u = (i + 0.5)/n;
        s += p.cdf((t - b*p.quantile(u))/a);
    }
    return static_cast<double>(s/n);
}

// P(a w1 + b w2 <= t) for Rademacher w by enumerating the four sign pairs.
double rademacher_two_sparse_cdf(double a, double b, double t) {
    double s = 0;
    for (int s1: {-1, 1})
        for (int s2: {-1, 1}) s += (a*s1 + b*s2 <= t) ? 0.25 : 0.0;
    return s;
}

// Closed form of P(a U1 + delta U2 <= -sqrt3) for U uniform on [-sqrt3, sqrt3],
// valid while 1 - a < delta (a triangle in the (U1, U2) square).
double uniform_probe(double a, double delta) {
    double g = a - 1.0 + delta;
    return g*g/(8.0*a*delta);
}

void check_common(const counterexample_scenario& s) {
    const double delta = s.params.at("delta");
    const auto d = static_cast<std::size_t>(s.params.at("d"));
    CHECK(s.predicted_floor > 0);
    CHECK(s.projection_law.is_exact());
    REQUIRE(s.dirs.size() == d - 1);
    REQUIRE(s.dirs.dimension() == d);
    REQUIRE(s.model.dimension == d);
    auto ref = spiked_set(d, delta);
    for (std::size_t i = 0; i < ref.size(); i += 1 + ref.size()/50) {
        CHECK(s.dirs.record(i).axis == ref.record(i).axis);
        CHECK(s.dirs.record(i).a == ref.record(i).a);
        CHECK(s.dirs.record(i).b == ref.record(i).b);
    }
    CHECK(s.params.at("F_probe") == s.projection_law.cdf(s.t_probe));
}

} // namespace

TEST_CASE("spiked set examples") {
    auto one = spiked_set(2, 0.6);
    REQUIRE(one.size() == 1);
    CHECK(one.record(0).a == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(one.record(0).b == 0.6);
    CHECK(one.record(0).axis == 1);

    auto a = spiked_set(50, 0.3);
    CHECK(a.size() == 49);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) REQUIRE(a.distance(i, j) == doctest::Approx(0.3*std::sqrt(2.0)));
    CHECK(point_extent(a).diameter <= 2*0.3*std::sqrt(2.0));

    CHECK_THROWS_AS(spiked_set(1, 0.5), domain_error);
    CHECK_THROWS_AS(spiked_set(5, 0.0), domain_error);
    CHECK_THROWS_AS(spiked_set(5, 1.0), domain_error);
}

TEST_CASE("spiked set at d = 2^16") {
    auto a = spiked_set(std::size_t{1} << 16, 0.05);
    CHECK(a.size() == 65535);
    double g = gamma_upper(greedy_admissible_sequence(a), 1);
    CHECK(g <= 4*0.05*16 + 0.1);
}

TEST_CASE("scenario case names") {
    CHECK(parse_scenario_case("atom") == scenario_case::atom);
    CHECK(parse_scenario_case("heavy-tail") == scenario_case::heavy_tail);
    CHECK(parse_scenario_case("heavy_tail") == scenario_case::heavy_tail);
    CHECK(parse_scenario_case("variance") == scenario_case::variance);
    CHECK(to_string(scenario_case::heavy_tail) == "heavy-tail");
    CHECK_THROWS_AS(parse_scenario_case("atoms"), configuration_error);
}

TEST_CASE("atom scenario") {
    for (std::size_t m: {8u, 16u, 24u}) {
        auto s = atom_scenario(m);
        check_common(s);
        const double delta = s.params.at("delta"), a = std::sqrt(1 - delta*delta);
        CHECK(s.t_probe == -1.0);
        CHECK(s.predicted_floor == 1.0/16);
        CHECK(s.params.at("epsilon") == 0.125);
        double hits = std::ceil(0.5*m*(1 - 0.125) - 1e-9);
        CHECK(s.params.at("hits_needed") == hits);
        CHECK(s.params.at("d") == std::ceil(4*std::pow(2.0, hits)));
        CHECK(s.params.at("d") <= static_cast<double>(dimension_cap));
        CHECK(a*s.t_probe - delta/10 <= s.t_probe);
        CHECK(s.params.at("F_probe") == rademacher_two_sparse_cdf(a, delta, -1.0));
        CHECK(s.params.at("F_probe") == 0.25);
    }
    CHECK(atom_scenario(24).params.at("d") == 8192);
    CHECK_THROWS_AS(atom_scenario(7), domain_error);
    CHECK_THROWS_AS(atom_scenario(64), configuration_error);
    auto forced = atom_scenario(64, 1000);
    CHECK(forced.params.at("d") == 1000);
    CHECK(forced.params.at("dimension_override") == 1);
}

TEST_CASE("heavy-tail scenario") {
    pareto_oracle po;
    auto s = heavy_tail_scenario(8, pareto_law(2.5));
    check_common(s);
    const double t = s.params.at("t"), delta = s.params.at("delta");
    CHECK(t > 20);
    CHECK(delta == doctest::Approx(2/t).epsilon(1e-15));
    CHECK(s.params.at("beta") == doctest::Approx(po.cdf(-t)).epsilon(1e-12));
    CHECK(po.cdf(-t) >= std::exp(-t/(8/5.0)));
    CHECK(s.t_probe == -2.0);
    CHECK(s.predicted_floor == 0.1);
    const double a = std::sqrt(1 - delta*delta);
    CHECK(s.params.at("F_probe") == doctest::Approx(pareto_two_sparse_cdf(a, delta, -2.0)).epsilon(1e-6));
    CHECK(s.projection_law.prob_abs_at_least(2.0) <= 0.25);
    CHECK_THROWS_AS(heavy_tail_scenario(10, pareto_law(2.5)), configuration_error);
    CHECK_THROWS_AS(heavy_tail_scenario(8, laplace_law()), configuration_error);
    CHECK_THROWS_AS(heavy_tail_scenario(4, pareto_law(2.5)), domain_error);
}

TEST_CASE("Chebyshev bound for unit projections of isotropic laws") {
    for (const auto& law: {normal_law(), laplace_law(), uniform_law(), rademacher_law(), pareto_law(2.5)})
        for (double delta: {0.05, 0.3, 0.7}) {
            auto p = two_sparse_projection_law(law, std::sqrt(1 - delta*delta), delta);
            CHECK(p.prob_abs_at_least(2.0) <= 0.25);
        }
}

TEST_CASE("variance scenario") {
    CHECK_THROWS_AS(variance_scenario(400), configuration_error);
    CHECK_THROWS_AS(variance_scenario(401, 100), domain_error);
    CHECK_THROWS_AS(variance_scenario(81, 100), domain_error);

    auto s = variance_scenario(400, 10000);
    check_common(s);
    const double delta = 0.05, a = std::sqrt(1 - delta*delta);
    CHECK(s.params.at("delta") == delta);
    CHECK(s.params.at("d") == 10000);
    CHECK(s.t_probe == -std::sqrt(3.0));
    CHECK(s.predicted_floor == doctest::Approx(delta/12));
    double f = s.params.at("F_probe");
    CHECK(f == doctest::Approx(uniform_probe(a, delta)).epsilon(1e-12));
    CHECK(f >= 0.1*delta);
    CHECK(f <= 0.25*delta);
    CHECK(s.params.at("sigma2_sqrt_m") >= 0.1);
    CHECK(s.params.at("sigma2_sqrt_m") <= 0.25);
    CHECK(a*(-1 + 0.7*delta) - 0.8*delta <= -1);

    auto small = variance_scenario(100);
    CHECK(small.params.at("d") == 10000);
    CHECK(small.params.at("F_probe") == doctest::Approx(uniform_probe(std::sqrt(0.99), 0.1)).epsilon(1e-12));
}

TEST_CASE("two-sparse uniform law tends to the single-coordinate law") {
    auto u = uniform_law();
    for (double b: {1e-2, 1e-4, 1e-6}) {
        auto p = two_sparse_projection_law(u, std::sqrt(1 - b*b), b);
        double worst = 0;
        for (double t = -2.0; t <= 2.0; t += 0.01) worst = std::max(worst, std::abs(p.cdf(t) - u.cdf(t)));
        CHECK(worst <= 2*b);
    }
}

TEST_CASE("scenario sets have gamma1 below 8 delta log d") {
    for (const auto& s: {atom_scenario(16), atom_scenario(24), heavy_tail_scenario(8, pareto_law(2.5)),
                         variance_scenario(100)}) {
        double g = gamma_upper(greedy_admissible_sequence(s.dirs), 1);
        CHECK(g <= 8*s.params.at("delta")*std::log(s.params.at("d")));
    }
}
