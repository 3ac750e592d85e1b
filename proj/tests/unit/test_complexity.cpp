#include "doctest.h"

#include <cmath>
#include <vector>

#include "dkw/complexity.hpp"
#include "dkw/constructions.hpp"
#include "dkw/directions.hpp"
#include "dkw/errors.hpp"
#include "dkw/rng.hpp"
#include "oracles.hpp"

using namespace dkw;

namespace {

oracle::distance_fn dist_of(const point_cloud& p) {
    return [&p](std::size_t i, std::size_t j) {
        // recompute from coordinates, not through the class under test
        auto a = p.densify(i), b = p.densify(j);
        double s = 0;
        for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k])*(a[k] - b[k]);
        return std::sqrt(s);
    };
}

// Small random instances: points on S^2 or S^4 with 3..12 members.
point_cloud small_instance(std::uint64_t seed, std::size_t max_n = 12) {
    splitmix_engine g(seed);
    std::size_t n = 3 + g() % (max_n - 2);
    std::size_t d = (g() % 2) ? 3 : 5;
    return random_sphere_directions(d, n, seed).points();
}

double linear_scan_nearest(const point_cloud& p, const std::vector<std::size_t>& level, std::size_t i) {
    auto dist = dist_of(p);
    double best = 1e300;
    for (auto c: level) best = std::min(best, dist(i, c));
    return best;
}

} // namespace

TEST_CASE("covering examples") {
    auto e = direction_set::dense(2, {1.0, 0.0, 0.0, 1.0});
    CHECK(covering_number(e, 1.5).count == 1);
    CHECK(covering_number(e, 1.0).count == 2);
    CHECK_THROWS_AS(covering_number(e, 0.0), domain_error);
}

TEST_CASE("packing examples") {
    auto pm = direction_set::dense(1, {1.0, -1.0});
    CHECK(packing_number(pm, 1.0) == 2);
    CHECK(packing_number(axis_direction(4), 0.1) == 1);
}

TEST_CASE("greedy cover against exhaustive set cover and packing") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto p = small_instance(seed);
        auto dist = dist_of(p);
        const std::size_t n = p.size();
        for (double delta: {0.3, 0.6, 1.0, 1.5}) {
            auto greedy = covering_number(p, delta);
            auto exact = oracle::exhaustive_min_cover(n, dist, delta);
            auto pack = oracle::exhaustive_max_packing(n, dist, delta);
            CAPTURE(seed);
            CAPTURE(delta);
            REQUIRE(greedy.count == greedy.centers.size());
            CHECK(greedy.count >= exact);
            CHECK(greedy.count <= pack);
            // radius factor 2: a delta/2 ball holds at most one delta-separated point
            CHECK(greedy.count <= oracle::exhaustive_min_cover(n, dist, delta/2));
            CHECK(packing_number(p, 2*delta) <= greedy.count);
            // a maximal packing is itself a cover; the maximum one dominates any greedy count
            CHECK(exact <= packing_number(p, delta));
            CHECK(packing_number(p, delta) <= pack);
            for (std::size_t i = 0; i < n; ++i) {
                double near = 1e300;
                for (auto c: greedy.centers) near = std::min(near, dist(i, c));
                REQUIRE(near <= delta + 1e-12);
            }
        }
    }
}

TEST_CASE("cover and packing counts are non-increasing in delta") {
    auto p = random_sphere_directions(4, 300, 6);
    std::size_t prev_c = p.size() + 1, prev_p = p.size() + 1;
    for (double delta = 0.02; delta < 2.5; delta *= 1.2) {
        auto c = covering_number(p, delta).count;
        auto k = packing_number(p, delta);
        CHECK(c <= prev_c);
        CHECK(k <= prev_p);
        prev_c = c;
        prev_p = k;
    }
}

TEST_CASE("admissible sequences: sizes, nesting, exact assignments") {
    CHECK(admissible_level_sizes(1) == std::vector<std::size_t>{1});
    CHECK(admissible_level_sizes(5) == std::vector<std::size_t>{1, 4, 5});
    CHECK(admissible_level_sizes(16) == std::vector<std::size_t>{1, 4, 16});
    CHECK(admissible_level_sizes(17) == std::vector<std::size_t>{1, 4, 16, 17});
    CHECK(admissible_level_sizes(70000) == std::vector<std::size_t>{1, 4, 16, 256, 65536, 70000});

    auto single = greedy_admissible_sequence(axis_direction(3));
    CHECK(single.levels.size() == 1);
    CHECK(single.distance[0][0] == 0.0);
    CHECK(gamma_upper(single, 1) == 0.0);

    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto p = random_sphere_directions(3, 5 + seed*7, seed).points();
        auto seq = greedy_admissible_sequence(p);
        auto sizes = admissible_level_sizes(p.size());
        REQUIRE(seq.levels.size() == sizes.size());
        REQUIRE_FALSE(seq.truncated);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            REQUIRE(seq.levels[s].size() == sizes[s]);
            if (s > 0 && s + 1 < sizes.size())
                for (std::size_t k = 0; k < seq.levels[s - 1].size(); ++k)
                    REQUIRE(seq.levels[s][k] == seq.levels[s - 1][k]);
            for (std::size_t i = 0; i < p.size(); ++i) {
                double ref = linear_scan_nearest(p, seq.levels[s], i);
                REQUIRE(std::abs(seq.distance[s][i] - ref) <= 1e-9);
                REQUIRE(std::abs(p.distance(i, seq.nearest[s][i]) - seq.distance[s][i]) <= 1e-9);
            }
        }
        for (double v: seq.distance.back()) REQUIRE(v == 0.0);
        // per-point distances shrink with s, so the 2^s weights dominate 2^{s/2}
        CHECK(gamma_upper(seq, 1) >= gamma_upper(seq, 2));
    }
    CHECK_THROWS_AS(gamma_upper(single, 3), domain_error);
}

TEST_CASE("farthest-point levels are within twice the optimal k-center radius") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto p = small_instance(seed + 500, 10);
        auto dist = dist_of(p);
        for (std::size_t k = 1; k <= p.size(); ++k) {
            auto fpt = farthest_point_traversal(p, k);
            std::vector<std::size_t> centers(fpt.order.begin(), fpt.order.begin() + std::min(k, fpt.order.size()));
            double r = 0;
            for (std::size_t i = 0; i < p.size(); ++i) r = std::max(r, linear_scan_nearest(p, centers, i));
            CAPTURE(seed);
            CAPTURE(k);
            CHECK(r <= 2*oracle::exhaustive_k_center(p.size(), dist, k) + 1e-12);
        }
    }
}

TEST_CASE("gamma_upper is scale-equivariant and translation-invariant") {
    auto p = random_sphere_directions(6, 400, 12).points();
    auto base = greedy_admissible_sequence(p);
    const double g1 = gamma_upper(base, 1), g2 = gamma_upper(base, 2);
    for (double c: {0.001, 0.37, 3.0, 1024.0}) {
        auto seq = greedy_admissible_sequence(p.scaled(c));
        CHECK(std::abs(gamma_upper(seq, 1) - c*g1) <= 1e-12*c*g1);
        CHECK(std::abs(gamma_upper(seq, 2) - c*g2) <= 1e-12*c*g2);
    }
    std::vector<double> shift{0.5, -1.0, 2.0, 0.0, 0.25, -3.0};
    auto moved = greedy_admissible_sequence(p.translated(shift));
    CHECK(moved.levels == base.levels);
    CHECK(gamma_upper(moved, 1) == doctest::Approx(g1).epsilon(1e-12));
}

TEST_CASE("spiked sets stay below the explicit gamma1 bound") {
    for (std::size_t e: {4u, 10u, 12u}) {
        std::size_t d = std::size_t{1} << e;
        for (double delta: {0.01, 0.05, 0.2}) {
            auto a = spiked_set(d, delta);
            auto ext = point_extent(a);
            CHECK(ext.diameter <= 2*delta*std::sqrt(2.0) + 1e-12);
            CHECK(ext.diameter == doctest::Approx(delta*std::sqrt(2.0)));
            double g = gamma_upper(greedy_admissible_sequence(a), 1);
            CHECK(g <= 4*delta*std::log2(static_cast<double>(d)) + 2*delta);
        }
    }
}

TEST_CASE("entropy functionals: two-point set and singleton") {
    auto pm = direction_set::dense(1, {1.0, -1.0});
    auto grid = default_scale_grid(point_extent(pm));
    auto ev = entropy_functionals(pm, grid);
    CHECK(ev.gamma1_entropy_sup == doctest::Approx(2*std::log(2.0)).epsilon(1e-12));
    CHECK(ev.entropy_integral_1 == doctest::Approx(2*std::log(2.0)).epsilon(1e-12));

    auto one = analyze_complexity(axis_direction(5));
    CHECK(one.gamma1_upper == 0.0);
    CHECK(one.gamma2_upper == 0.0);
    CHECK(one.gamma1_entropy_sup == 0.0);
    CHECK(one.entropy_integral_1 == 0.0);
    CHECK(one.diameter == 0.0);

    std::vector<double> none;
    CHECK_THROWS_AS(entropy_functionals(pm, none), domain_error);
}

TEST_CASE("default scale grid") {
    extent ext{2.0, 0.01};
    auto g = default_scale_grid(ext);
    REQUIRE(g.size() == 64);
    CHECK(g.back() == doctest::Approx(2.0));
    CHECK(g.front() >= 0.005 - 1e-15);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("1000 points on the sphere: finite, positive, reproducible") {
    auto p = random_sphere_directions(3, 1000, 77);
    auto a = analyze_complexity(p), b = analyze_complexity(random_sphere_directions(3, 1000, 77));
    for (double v: {a.gamma1_entropy_sup, a.entropy_integral_1, a.gamma1_upper, a.gamma2_upper}) {
        CHECK(std::isfinite(v));
        CHECK(v > 0);
    }
    CHECK(a.gamma1_entropy_sup == b.gamma1_entropy_sup);
    CHECK(a.entropy_integral_1 == b.entropy_integral_1);
    CHECK(a.gamma1_upper == b.gamma1_upper);
    CHECK(a.cover_sizes == b.cover_sizes);
    CHECK(a.n_points == 1000);
}

TEST_CASE("chaining-from-covers bound on generated sets") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto r = analyze_complexity(random_sphere_directions(2 + seed % 5, 50*seed, seed));
        CHECK(r.gamma1_upper <= 4*r.entropy_integral_1 + 2*r.diameter);
        CHECK(r.gamma1_upper >= r.gamma2_upper);
    }
    auto s = analyze_complexity(spiked_set(1024, 0.05));
    CHECK(s.gamma1_upper <= 4*s.entropy_integral_1 + 2*s.diameter);
}

TEST_CASE("sudakov formula examples") {
    auto b8 = basis_pm(8);  // 16 points, distances sqrt2 and 2
    REQUIRE(covering_number(b8, 0.5).count == 16);
    CHECK(sudakov_lower_formula(b8, 0.5, 100) == doctest::Approx(0.1177410022515475).epsilon(1e-12));
    CHECK(sudakov_lower_formula(axis_direction(3), 0.5, 100) == 0.0);
    auto b32 = basis_pm(32);
    REQUIRE(covering_number(b32, 1.0).count == 64);
    CHECK(sudakov_lower_formula(b32, 1.0, 250) == doctest::Approx(std::sqrt(std::log(64.0)/250)).epsilon(1e-14));
}
