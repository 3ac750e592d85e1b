#include "dkw/lemma_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dkw/errors.hpp"

namespace dkw {

namespace {

void project_rows(const column_source& s, std::span<const double> v, std::vector<double>& out) {
    out.assign(s.rows(), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] == 0.0) continue;
        auto col = s.column(j);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[j]*col[i];
    }
}

inequality_check finish(inequality_check c) {
    c.slack = c.rhs - c.lhs;
    c.holds = c.lhs <= c.rhs + c.mc_tolerance;
    return c;
}

std::vector<double> difference(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw domain_error("directions have different dimensions");
    std::vector<double> d(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) d[k] = x[k] - y[k];
    return d;
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double a: v) s += a*a;
    return std::sqrt(s);
}

double prob_abs(const law1d& law, double r) {
    if (law.atoms.size() == 1 && law.atoms[0].value == 0.0) return 0.0;
    return law.prob_abs_at_least(r);
}

law1d require_exact(const vector_model& model, std::span<const double> v, const char* what) {
    auto law = exact_projection_law(model, v);
    if (!law) throw configuration_error(std::string("no exact law for the ") + what);
    return *law;
}

} // namespace

inequality_check check_pert1(const sample_batch& sample, std::span<const double> x, std::span<const double> y,
                             const law1d& law_x, const law1d& law_y, const law1d& diff_law, double r) {
    if (!(r > 0.0)) throw domain_error("radius must be positive");
    if (x.size() != sample.dimension() || y.size() != sample.dimension())
        throw domain_error("direction dimension mismatch");
    if (!law_x.is_exact() || !law_y.is_exact() || !diff_law.is_exact())
        throw configuration_error("pert1 check needs exact laws");
    if (!law_y.density_bound) throw configuration_error("pert1 check needs a density bound");

    std::vector<double> px, py;
    project_rows(sample, x, px);
    project_rows(sample, y, py);
    std::size_t far = 0;
    for (std::size_t i = 0; i < px.size(); ++i) far += std::abs(px[i] - py[i]) >= r;
    const double pm = static_cast<double>(far)/static_cast<double>(px.size());
    const double p = prob_abs(diff_law, r);
    const double dy = *law_y.density_bound;

    inequality_check c;
    c.name = "pert1";
    const double ks_x = ks_sup_deviation(ecdf(px), law_x).sup_deviation;
    const double ks_y = ks_sup_deviation(ecdf(py), law_y).sup_deviation;
    c.lhs = ks_x;
    c.rhs = ks_y + p + pm + 2.0*r*dy;
    c.context = {{"r", r}, {"m", static_cast<double>(px.size())}, {"distance", norm(difference(x, y))},
                 {"ks_y", ks_y}, {"P_far", p}, {"Pm_far", pm}, {"D", dy}};
    return finish(c);
}

inequality_check check_pert1(const sample_batch& sample, std::span<const double> x, std::span<const double> y,
                             double r) {
    const auto& model = sample.model();
    auto diff = difference(x, y);
    return check_pert1(sample, x, y, require_exact(model, x, "first direction"),
                       require_exact(model, y, "second direction"), require_exact(model, diff, "difference"), r);
}

inequality_check check_cont1(const ecdf& e, const law1d& ref, double delta) {
    if (!ref.is_exact() || !ref.is_continuous()) throw configuration_error("cont1 check needs an exact continuous law");
    inequality_check c;
    c.name = "cont1";
    double grid = grid_deviation(e, ref, delta);
    c.lhs = ks_sup_deviation(e, ref).sup_deviation;
    c.rhs = delta + grid;
    c.context = {{"delta", delta}, {"m", static_cast<double>(e.size())}, {"grid_deviation", grid}};
    return finish(c);
}

inequality_check check_symmetric_difference(const vector_model& model, std::span<const double> x,
                                            std::span<const double> y, double u, double r, std::size_t n_mc,
                                            std::uint64_t seed) {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("level must lie in (0,1)");
    if (!(r > 0.0)) throw domain_error("radius must be positive");
    if (n_mc == 0) throw domain_error("Monte Carlo size must be positive");
    if (x.size() != model.dimension || y.size() != model.dimension) throw domain_error("direction dimension mismatch");
    auto diff = difference(x, y);
    law1d lx = require_exact(model, x, "first direction");
    law1d ly = require_exact(model, y, "second direction");
    law1d ld = require_exact(model, diff, "difference");
    if (!lx.density_bound || !ly.density_bound) throw configuration_error("symmetric difference check needs density bounds");
    const double dmax = std::max(*lx.density_bound, *ly.density_bound);
    const double qx = lx.quantile(u), qy = ly.quantile(u);

    streamed_sample s(model, n_mc, seed);
    std::vector<double> px, py;
    project_rows(s, x, px);
    project_rows(s, y, py);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n_mc; ++i) hits += (px[i] <= qx) != (py[i] <= qy);

    inequality_check c;
    c.name = "symmetric_difference";
    const double n = static_cast<double>(n_mc);
    c.lhs = static_cast<double>(hits)/n;
    c.rhs = 4.0*(prob_abs(ld, r) + r*dmax);
    c.mc_tolerance = 3.0*std::sqrt(c.lhs*(1.0 - c.lhs)/n) + 3.0/n;
    double dot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) dot += x[k]*y[k];
    double angle = std::acos(std::clamp(dot/(norm(x)*norm(y)), -1.0, 1.0));
    c.context = {{"u", u}, {"r", r}, {"n_mc", n}, {"distance", norm(diff)}, {"angle", angle}, {"D", dmax}};
    return finish(c);
}

inequality_check check_psi1(const law1d& z, double L, std::span<const double> t_grid) {
    if (!(L > 0.0)) throw domain_error("tail constant must be positive");
    if (t_grid.empty()) throw domain_error("empty t grid");
    auto excess = [&](double t) {
        double s = t*L;
        double p = s > 0.0 ? z.prob_abs_at_least(s) : 1.0;
        return p - 2.0*std::exp(-t);
    };
    inequality_check c;
    c.name = "psi1";
    if (z.is_oracle()) {
        double n = z.resolution > 0.0 ? 1.0/z.resolution : 1.0;
        c.mc_tolerance = 1.5/std::sqrt(n) + 3.0/n;
    }
    c.lhs = -std::numeric_limits<double>::infinity();
    double prev_t = t_grid.front();
    double argmax = prev_t;
    for (double t: t_grid) {
        double v = excess(t);
        if (v > c.lhs) {
            c.lhs = v;
            argmax = t;
        }
        if (!c.violating_t && v > c.mc_tolerance) {
            double lo = prev_t, hi = t;
            if (excess(lo) <= c.mc_tolerance) {
                for (int it = 0; it < 100; ++it) {
                    double mid = 0.5*(lo + hi);
                    if (excess(mid) > c.mc_tolerance) hi = mid; else lo = mid;
                }
            }
            c.violating_t = hi;
        }
        prev_t = t;
    }
    c.rhs = 0.0;
    c.context = {{"L", L}, {"t_at_max", argmax}, {"t_max", t_grid.back()}};
    if (c.violating_t) c.context["first_violating_t"] = *c.violating_t;
    return finish(c);
}

std::vector<double> uniform_grid(double t_max, double step) {
    if (!(step > 0.0) || !(t_max >= 0.0)) throw domain_error("bad grid");
    std::vector<double> g;
    for (std::size_t k = 0; static_cast<double>(k)*step <= t_max*(1.0 + 1e-12); ++k) g.push_back(static_cast<double>(k)*step);
    return g;
}

} // namespace dkw
