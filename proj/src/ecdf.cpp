#include "dkw/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dkw/errors.hpp"

namespace dkw {

ecdf::ecdf(std::vector<double> values): sorted_(std::move(values)) {
    if (sorted_.empty()) throw domain_error("ecdf needs at least one value");
    for (double v: sorted_)
        if (!std::isfinite(v)) throw domain_error("ecdf values must be finite");
    std::sort(sorted_.begin(), sorted_.end());
}

double ecdf::eval(double t) const {
    auto k = std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
    return static_cast<double>(k)/static_cast<double>(sorted_.size());
}

double ecdf::eval_left(double t) const {
    auto k = std::lower_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin();
    return static_cast<double>(k)/static_cast<double>(sorted_.size());
}

double ecdf::quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw domain_error("ecdf quantile level must lie in (0,1]");
    const auto m = sorted_.size();
    const double md = static_cast<double>(m);
    auto k = static_cast<std::size_t>(std::ceil(u*md));
    k = std::clamp<std::size_t>(k, 1, m);
    // undo rounding that pushes u = i/m past i
    while (k > 1 && static_cast<double>(k - 1)/md >= u) --k;
    while (k < m && static_cast<double>(k)/md < u) ++k;
    return sorted_[k - 1];
}

ecdf build_ecdf(std::span<const double> values) {
    return ecdf(std::vector<double>(values.begin(), values.end()));
}

namespace {

double sigma_of(double f) {
    return std::sqrt(std::max(0.0, f*(1.0 - f)));
}

} // namespace

deviation_report ks_sup_deviation(const ecdf& e, const law1d& ref) {
    if (ref.is_oracle()) {
        if (!ref.oracle) throw configuration_error("oracle law without sample");
        return ks_between(e, *ref.oracle);
    }
    auto x = e.sorted_values();
    const std::size_t m = x.size();
    const double md = static_cast<double>(m);
    const bool continuous = ref.is_continuous();

    deviation_report rep;
    rep.sup_deviation = -1.0;
    std::size_t lo = 0;
    while (lo < m) {
        std::size_t hi = lo;
        while (hi < m && x[hi] == x[lo]) ++hi;
        double v = x[lo];
        double f = ref.cdf(v);
        double fl = continuous ? f : ref.cdf_left(v);
        double right = static_cast<double>(hi)/md - f;
        double left = fl - static_cast<double>(lo)/md;
        double cands[4] = {right, -right, left, -left};
        for (int c = 0; c < 4; ++c) {
            if (cands[c] > rep.sup_deviation) {
                rep.sup_deviation = cands[c];
                rep.argmax_t = v;
                rep.side = c < 2 ? limit_side::right : limit_side::left;
                rep.sigma_at_argmax = sigma_of(f);
            }
        }
        lo = hi;
    }
    rep.sup_deviation = std::clamp(rep.sup_deviation, 0.0, 1.0);
    return rep;
}

deviation_report ks_between(const ecdf& a, const ecdf& b) {
    auto x = a.sorted_values();
    auto y = b.sorted_values();
    const double mx = static_cast<double>(x.size()), my = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    deviation_report rep;
    rep.argmax_t = std::min(x.front(), y.front());
    while (i < x.size() || j < y.size()) {
        double v = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        double fb = static_cast<double>(j)/my;
        double d = std::abs(static_cast<double>(i)/mx - fb);
        if (d > rep.sup_deviation) {
            rep.sup_deviation = d;
            rep.argmax_t = v;
            rep.side = limit_side::right;
            rep.sigma_at_argmax = sigma_of(fb);
        }
    }
    return rep;
}

std::vector<double> grid_levels(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw domain_error("grid spacing must lie in (0,1)");
    auto count = static_cast<std::size_t>(std::floor((1.0 - delta)/delta + 1e-9));
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t l = 1; l <= count; ++l) grid.push_back(static_cast<double>(l)*delta);
    return grid;
}

double grid_deviation(const ecdf& e, const law1d& ref, double delta) {
    if (!(delta > 0.0 && delta < 0.25)) throw domain_error("grid_deviation needs delta in (0, 1/4)");
    double best = 0.0;
    for (double u: grid_levels(delta))
        best = std::max(best, std::abs(e.eval(ref.quantile(u)) - u));
    return best;
}

pointwise pointwise_deviation(const ecdf& e, const law1d& ref, double t) {
    double f = ref.cdf(t);
    return {e.eval(t), f, sigma_of(f)};
}

const normal_cdf_table& normal_cdf_table::instance() {
    static const normal_cdf_table table;
    return table;
}

normal_cdf_table::normal_cdf_table() {
    coef_.resize(4*cells);
    for (std::size_t k = 0; k < cells; ++k) {
        double t0 = -range + static_cast<double>(k)*h, t1 = t0 + h;
        double p0 = std_normal_cdf(t0), p1 = std_normal_cdf(t1);
        double d0 = std_normal_pdf(t0)*h, d1 = std_normal_pdf(t1)*h;
        double* c = &coef_[4*k];
        c[0] = p0;
        c[1] = d0;
        c[2] = 3.0*(p1 - p0) - 2.0*d0 - d1;
        c[3] = 2.0*(p0 - p1) + d0 + d1;
    }
}

double normal_cdf_table::tail(double t) {
    return std_normal_cdf(t);
}

namespace {

template <class F>
deviation_report bucket_ks(std::span<const double> values, F&& cdf, ks_workspace& ws) {
    const std::size_t m = values.size();
    const double md = static_cast<double>(m);
    ws.u.resize(m);
    double* u = ws.u.data();
    for (std::size_t i = 0; i < m; ++i) u[i] = cdf(values[i]);
    ws.count.assign(m, 0);
    ws.ext.assign(m, {2.0, -1.0});
    auto* count = ws.count.data();
    auto* ext = ws.ext.data();
    for (std::size_t i = 0; i < m; ++i) {
        auto j = static_cast<std::size_t>(std::max(0.0, u[i]*md));
        if (j >= m) j = m - 1;
        ++count[j];
        ext[j][0] = std::min(ext[j][0], u[i]);
        ext[j][1] = std::max(ext[j][1], u[i]);
    }
    // the sup over a cell sits at its extremes: consecutive values differ by < 1/m in u
    deviation_report rep;
    rep.sup_deviation = -1.0;
    double best_u = 0.0;
    std::size_t cum = 0;
    double below = 0.0;  // cum/m
    for (std::size_t j = 0; j < m; ++j) {
        if (count[j] == 0) continue;
        cum += count[j];
        const double upto = static_cast<double>(cum)/md;
        const double plus = upto - ext[j][1];
        const double minus = ext[j][0] - below;
        below = upto;
        if (plus > rep.sup_deviation) {
            rep.sup_deviation = plus;
            rep.side = limit_side::right;
            best_u = ext[j][1];
        }
        if (minus > rep.sup_deviation) {
            rep.sup_deviation = minus;
            rep.side = limit_side::left;
            best_u = ext[j][0];
        }
    }
    // recover the sample point carrying best_u
    const bool left = rep.side == limit_side::left;
    rep.argmax_t = left ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
        if (u[i] == best_u) rep.argmax_t = left ? std::min(rep.argmax_t, values[i]) : std::max(rep.argmax_t, values[i]);
    rep.sigma_at_argmax = sigma_of(best_u);
    rep.sup_deviation = std::clamp(rep.sup_deviation, 0.0, 1.0);
    return rep;
}

} // namespace

deviation_report ks_sup_deviation_unsorted(std::span<const double> values, const law1d& ref, ks_workspace& ws) {
    if (values.empty()) throw domain_error("ks needs at least one value");
    if (ref.is_exact() && ref.is_continuous()) {
        if (ref.family == law_family::gaussian) {
            const auto& table = normal_cdf_table::instance();
            const double inv = 1.0/ref.scale;
            if (ref.scale == 1.0) return bucket_ks(values, table, ws);
            return bucket_ks(values, [&](double x) { return table(x*inv); }, ws);
        }
        return bucket_ks(values, ref.cdf, ws);
    }
    ws.scratch.assign(values.begin(), values.end());
    return ks_sup_deviation(ecdf(std::move(ws.scratch)), ref);
}

} // namespace dkw
