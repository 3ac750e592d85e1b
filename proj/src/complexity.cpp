#include "dkw/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "dkw/errors.hpp"

namespace dkw {

namespace {

// Incremental farthest-point traversal state.
class fpt_state {
public:
    explicit fpt_state(const point_cloud& points)
        : points_(points), mind_(points.size()), nearest_(points.size(), 0), buf_(points.size()) {
        points_.distances_from(0, mind_);
        mind_[0] = 0.0;
        order_.push_back(0);
        radius_.push_back(std::numeric_limits<double>::infinity());
    }

    // Largest remaining distance and its (smallest) index.
    std::pair<double, std::size_t> farthest() const {
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < mind_.size(); ++i) {
            if (mind_[i] > best) {
                best = mind_[i];
                arg = i;
            }
        }
        return {best, arg};
    }

    // Adds the farthest point; false once everything is covered exactly.
    bool step() {
        auto [r, j] = farthest();
        if (!(r > 0.0)) return false;
        order_.push_back(j);
        radius_.push_back(r);
        points_.distances_from(j, buf_);
        for (std::size_t i = 0; i < mind_.size(); ++i) {
            if (buf_[i] < mind_[i]) {
                mind_[i] = buf_[i];
                nearest_[i] = j;
            }
        }
        mind_[j] = 0.0;
        nearest_[j] = j;
        return true;
    }

    std::size_t centers() const { return order_.size(); }
    const std::vector<std::size_t>& order() const { return order_; }
    const std::vector<double>& radius() const { return radius_; }
    const std::vector<double>& mind() const { return mind_; }
    const std::vector<std::size_t>& nearest() const { return nearest_; }

private:
    const point_cloud& points_;
    std::vector<double> mind_;
    std::vector<std::size_t> nearest_;
    std::vector<double> buf_;
    std::vector<std::size_t> order_;
    std::vector<double> radius_;
};

} // namespace

traversal farthest_point_traversal(const point_cloud& points, std::size_t max_centers) {
    if (points.size() == 0) throw domain_error("empty point set");
    fpt_state st(points);
    const std::size_t cap = std::min(max_centers, points.size());
    while (st.centers() < cap && st.step()) {}
    return {st.order(), st.radius()};
}

cover covering_number(const point_cloud& points, double delta) {
    if (!(delta > 0.0)) throw domain_error("covering radius must be positive");
    if (points.size() == 0) throw domain_error("empty point set");
    fpt_state st(points);
    while (st.farthest().first > delta) st.step();
    return {st.centers(), st.order()};
}

std::size_t packing_number(const point_cloud& points, double delta) {
    if (!(delta > 0.0)) throw domain_error("packing radius must be positive");
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool separated = true;
        for (auto c: chosen) {
            if (points.distance(i, c) <= delta) {
                separated = false;
                break;
            }
        }
        if (separated) chosen.push_back(i);
    }
    return chosen.size();
}

std::vector<std::size_t> admissible_level_sizes(std::size_t n) {
    if (n == 0) throw domain_error("empty point set");
    std::vector<std::size_t> sizes{1};
    for (unsigned s = 1; sizes.back() < n; ++s) {
        unsigned exponent = 1u << s;  // 2^s
        std::size_t cap = exponent >= 63 ? n : std::min<std::size_t>(n, std::size_t{1} << exponent);
        sizes.push_back(cap);
    }
    return sizes;
}

admissible_sequence greedy_admissible_sequence(const point_cloud& points, std::size_t max_centers) {
    const std::size_t n = points.size();
    auto sizes = admissible_level_sizes(n);
    admissible_sequence seq;
    fpt_state st(points);
    const std::size_t last = sizes.size() - 1;
    for (std::size_t s = 0; s < last; ++s) {
        if (sizes[s] > max_centers) {
            seq.truncated = true;
            return seq;
        }
        while (st.centers() < sizes[s] && st.step()) {}
        seq.levels.push_back(st.order());
        seq.nearest.push_back(st.nearest());
        seq.distance.push_back(st.mind());
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    seq.levels.push_back(all);
    seq.nearest.push_back(all);
    seq.distance.emplace_back(n, 0.0);
    return seq;
}

double gamma_upper(const admissible_sequence& seq, int alpha) {
    if (alpha != 1 && alpha != 2) throw domain_error("alpha must be 1 or 2");
    if (seq.distance.empty()) return 0.0;
    const std::size_t n = seq.distance.front().size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t s = 0; s < seq.distance.size(); ++s)
            sum += std::exp2(static_cast<double>(s)/alpha)*seq.distance[s][i];
        best = std::max(best, sum);
    }
    return best;
}

entropy_values entropy_functionals(const traversal& fpt, std::span<const double> scales) {
    if (scales.empty()) throw domain_error("scale grid is empty");
    std::vector<double> grid(scales.begin(), scales.end());
    std::sort(grid.begin(), grid.end());
    if (!(grid.front() > 0.0)) throw domain_error("scales must be positive");
    // radii after the first center are non-increasing
    std::vector<double> radii(fpt.radius.begin() + 1, fpt.radius.end());
    auto count = [&](double delta) {
        auto k = std::upper_bound(radii.begin(), radii.end(), delta, std::greater<double>()) - radii.begin();
        // k = #{r : r >= delta}
        return static_cast<std::size_t>(k) + 1;
    };
    entropy_values ev;
    double prev = 0.0;
    for (double g: grid) {
        std::size_t n = count(g);
        double ln = std::log(static_cast<double>(n));
        if (g*ln > ev.gamma1_entropy_sup) {
            ev.gamma1_entropy_sup = g*ln;
            ev.maximizing_scale = g;
        }
        ev.entropy_integral_1 += (g - prev)*ln;
        ev.cover_sizes.emplace_back(g, n);
        prev = g;
    }
    return ev;
}

entropy_values entropy_functionals(const point_cloud& points, std::span<const double> scales) {
    if (scales.empty()) throw domain_error("scale grid is empty");
    return entropy_functionals(farthest_point_traversal(points), scales);
}

extent point_extent(const point_cloud& points) {
    extent ext;
    double minpos = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double d = points.distance(i, j);
            ext.diameter = std::max(ext.diameter, d);
            if (d > 0.0) minpos = std::min(minpos, d);
        }
    }
    ext.min_positive_distance = std::isfinite(minpos) ? minpos : 0.0;
    return ext;
}

std::vector<double> default_scale_grid(const extent& ext, std::size_t count) {
    if (!(ext.diameter > 0.0) || count == 0) return {};
    double hi = ext.diameter;
    double lo = std::max(hi/65536.0, 0.5*ext.min_positive_distance);
    if (count == 1 || lo >= hi) return {hi};
    std::vector<double> grid(count);
    double ratio = std::log(hi/lo)/static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) grid[k] = lo*std::exp(ratio*static_cast<double>(k));
    grid.back() = hi;
    return grid;
}

double sudakov_lower_formula(const point_cloud& points, double delta, std::size_t m) {
    if (!(delta > 0.0)) throw domain_error("scale must be positive");
    if (m == 0) throw domain_error("sample size must be positive");
    std::size_t n = covering_number(points, delta).count;
    if (n <= 1) return 0.0;
    return std::sqrt(delta*std::log(static_cast<double>(n))/static_cast<double>(m));
}

complexity_report analyze_complexity(const point_cloud& points) {
    complexity_report rep;
    rep.n_points = points.size();
    auto seq = greedy_admissible_sequence(points);
    rep.gamma1_upper = gamma_upper(seq, 1);
    rep.gamma2_upper = gamma_upper(seq, 2);
    auto ext = point_extent(points);
    rep.diameter = ext.diameter;
    auto grid = default_scale_grid(ext);
    if (grid.empty()) return rep;
    auto ev = entropy_functionals(points, grid);
    rep.gamma1_entropy_sup = ev.gamma1_entropy_sup;
    rep.entropy_integral_1 = ev.entropy_integral_1;
    rep.maximizing_scale = ev.maximizing_scale;
    rep.cover_sizes = std::move(ev.cover_sizes);
    return rep;
}

} // namespace dkw
