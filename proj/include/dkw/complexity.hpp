#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "dkw/directions.hpp"

namespace dkw {

// Farthest-point traversal from point 0, ties to the smallest index.
// radius[k] is the distance of order[k] to order[0..k-1] when it was chosen
// (radius[0] = +inf). Stops early once every point is a center or at distance 0.
struct traversal {
    std::vector<std::size_t> order;
    std::vector<double> radius;
};

traversal farthest_point_traversal(const point_cloud& points,
                                   std::size_t max_centers = std::numeric_limits<std::size_t>::max());

struct cover {
    std::size_t count = 0;
    std::vector<std::size_t> centers;
};

// Greedy internal cover with closed balls of radius delta.
cover covering_number(const point_cloud& points, double delta);

// Greedy maximal delta-separated subset (distance > delta), scanned in index order.
std::size_t packing_number(const point_cloud& points, double delta);

struct admissible_sequence {
    std::vector<std::vector<std::size_t>> levels;     // A_s as indices
    std::vector<std::vector<std::size_t>> nearest;    // [s][point] index of nearest element of A_s
    std::vector<std::vector<double>> distance;        // [s][point]
    bool truncated = false;
};

// Level sizes 1 and min(2^{2^s}, n) for s >= 1.
std::vector<std::size_t> admissible_level_sizes(std::size_t n);

admissible_sequence greedy_admissible_sequence(const point_cloud& points,
                                               std::size_t max_centers = std::numeric_limits<std::size_t>::max());

// max over points of sum_s 2^{s/alpha} distance(s, point).
double gamma_upper(const admissible_sequence& seq, int alpha);

struct entropy_values {
    double gamma1_entropy_sup = 0.0;     // max over the grid of delta*log N(delta)
    double entropy_integral_1 = 0.0;     // integral of log N, piecewise constant on the grid
    double maximizing_scale = 0.0;
    std::vector<std::pair<double, std::size_t>> cover_sizes;  // (scale, N) ascending
};

// N is the greedy open-ball cover count 1 + #{traversal radii >= delta}.
entropy_values entropy_functionals(const point_cloud& points, std::span<const double> scales);
entropy_values entropy_functionals(const traversal& fpt, std::span<const double> scales);

struct extent {
    double diameter = 0.0;
    double min_positive_distance = 0.0;  // 0 when all points coincide
};

extent point_extent(const point_cloud& points);

// 64 geometric scales from the diameter down to diameter/2^16, clipped below at
// half the smallest positive distance. Ascending.
std::vector<double> default_scale_grid(const extent& ext, std::size_t count = 64);

// sqrt(delta * log(covering_number(delta)) / m)
double sudakov_lower_formula(const point_cloud& points, double delta, std::size_t m);

struct complexity_report {
    double gamma1_upper = 0.0;
    double gamma2_upper = 0.0;
    double gamma1_entropy_sup = 0.0;
    double entropy_integral_1 = 0.0;
    std::vector<std::pair<double, std::size_t>> cover_sizes;
    double diameter = 0.0;
    double maximizing_scale = 0.0;
    std::size_t n_points = 0;
};

complexity_report analyze_complexity(const point_cloud& points);

} // namespace dkw
