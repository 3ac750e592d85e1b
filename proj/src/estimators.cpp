#include "dkw/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "dkw/errors.hpp"

namespace dkw {

bool validate_phi(const monotone_phi& phi) {
    const int n = 1000;
    double prev = 0.0;
    for (int k = 0; k < n; ++k) {
        double t = -50.0 + 100.0*k/(n - 1);
        double v = phi(t);
        if (!std::isfinite(v)) return false;
        if (std::abs(v) > phi.beta*(1.0 + std::pow(std::abs(t), phi.p))) return false;
        if (k > 0) {
            if (phi.direction == monotonicity::non_decreasing && v < prev) return false;
            if (phi.direction == monotonicity::non_increasing && v > prev) return false;
        }
        prev = v;
    }
    return true;
}

monotone_phi phi_identity() {
    return {"identity", [](double t) { return t; }, monotonicity::non_decreasing, 1.0, 1.0};
}

monotone_phi phi_signed_square() {
    return {"signed-square", [](double t) { return t*std::abs(t); }, monotonicity::non_decreasing, 2.0, 1.0};
}

monotone_phi phi_relu_square() {
    return {"relu-square", [](double t) { return t > 0.0 ? t*t : 0.0; }, monotonicity::non_decreasing, 2.0, 1.0};
}

monotone_phi phi_indicator(double tau) {
    char name[64];
    std::snprintf(name, sizeof name, "indicator:%g", tau);
    return {name, [tau](double t) { return t <= tau ? 1.0 : 0.0; }, monotonicity::non_increasing, 1.0, 1.0};
}

monotone_phi parse_phi(const std::string& spec) {
    if (spec == "identity") return phi_identity();
    if (spec == "signed-square") return phi_signed_square();
    if (spec == "relu-square") return phi_relu_square();
    if (spec.rfind("indicator:", 0) == 0) {
        std::size_t used = 0;
        double tau = 0.0;
        try {
            tau = std::stod(spec.substr(10), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != spec.size() - 10 || !std::isfinite(tau))
            throw configuration_error("bad indicator threshold in '" + spec + "'");
        return phi_indicator(tau);
    }
    throw configuration_error("unknown phi '" + spec + "'");
}

std::optional<double> gaussian_target(const monotone_phi& phi) {
    if (phi.name == "identity" || phi.name == "signed-square") return 0.0;
    if (phi.name == "relu-square") return 0.5;
    if (phi.name.rfind("indicator:", 0) == 0) return std_normal_cdf(std::stod(phi.name.substr(10)));
    return std::nullopt;
}

double trimmed_mean(std::span<const double> values, double delta) {
    if (values.empty()) throw domain_error("trimmed mean needs at least one value");
    if (!(delta >= 0.0 && delta < 0.1)) throw domain_error("trimming level must lie in [0, 1/10)");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    auto g = static_cast<std::size_t>(std::max(0.0, std::ceil(delta*static_cast<double>(m) - 1e-9)));
    double sum = 0.0;
    for (std::size_t i = g; i + g < m; ++i) sum += v[i];
    return sum/static_cast<double>(m);
}

double quantile_window_integral(const ecdf& e, const monotone_phi& phi, double lo, double hi) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw domain_error("window must satisfy 0 <= lo <= hi <= 1");
    const std::size_t m = e.size();
    const double md = static_cast<double>(m);
    auto x = e.sorted_values();
    auto first = static_cast<std::size_t>(std::floor(lo*md));
    double total = 0.0;
    for (std::size_t i = std::max<std::size_t>(first, 1); i <= m; ++i) {
        double a = static_cast<double>(i - 1)/md, b = static_cast<double>(i)/md;
        if (a >= hi) break;
        double w = std::min(b, hi) - std::max(a, lo);
        if (w > 0.0) total += phi(x[i - 1])*w;
    }
    return total;
}

double quantile_integral(const ecdf& e, const monotone_phi& phi, double delta) {
    if (!(delta > 0.0 && delta <= 0.01)) throw domain_error("delta must lie in (0, 1/100]");
    double s = std::sqrt(delta);
    return quantile_window_integral(e, phi, s, 1.0 - s);
}

double w1_between_ecdfs(const ecdf& a, const ecdf& b) {
    auto x = a.sorted_values();
    auto y = b.sorted_values();
    const std::size_t m1 = x.size(), m2 = y.size();
    if (m1 == m2) {
        double s = 0.0;
        for (std::size_t i = 0; i < m1; ++i) s += std::abs(x[i] - y[i]);
        return s/static_cast<double>(m1);
    }
    // breakpoints (i+1)/m1 and (j+1)/m2 compared exactly as (i+1) m2 vs (j+1) m1
    std::size_t i = 0, j = 0;
    double u = 0.0, total = 0.0;
    const double d = static_cast<double>(m1)*static_cast<double>(m2);
    while (i < m1 && j < m2) {
        std::size_t ci = (i + 1)*m2, cj = (j + 1)*m1;
        std::size_t next = std::min(ci, cj);
        double un = static_cast<double>(next)/d;
        total += (un - u)*std::abs(x[i] - y[j]);
        u = un;
        if (ci == next) ++i;
        if (cj == next) ++j;
    }
    return total;
}

w1_value w1_empirical_vs_law(const ecdf& e, const law1d& ref, std::size_t n_quad) {
    if (n_quad == 0) throw domain_error("quadrature size must be positive");
    if (ref.is_oracle()) {
        if (!ref.oracle) throw configuration_error("oracle law without sample");
        return {w1_between_ecdfs(e, *ref.oracle), 0.0};
    }
    auto x = e.sorted_values();
    const std::size_t m = x.size();
    const double md = static_cast<double>(m), nq = static_cast<double>(n_quad);
    const double inf = std::numeric_limits<double>::infinity();
    w1_value out;
    std::vector<double> cuts;
    for (std::size_t i = 1; i <= m; ++i) {
        const double c = x[i - 1];
        const double a = static_cast<double>(i - 1)/md, b = static_cast<double>(i)/md;
        cuts.clear();
        cuts.push_back(a);
        for (auto k = static_cast<std::size_t>(std::floor(a*nq)) + 1; static_cast<double>(k)/nq < b; ++k)
            cuts.push_back(static_cast<double>(k)/nq);
        double star = ref.cdf(c);
        if (star > a && star < b) cuts.push_back(star);
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double l = cuts[k], r = cuts[k + 1], h = r - l;
            if (!(h > 0.0)) continue;
            double est = h*std::abs(c - ref.quantile(0.5*(l + r)));
            out.value += est;
            if (l > 0.0 && r < 1.0) {
                double gl = std::abs(c - ref.quantile(l)), gr = std::abs(c - ref.quantile(r));
                out.error_bound += h*std::abs(gr - gl);
            } else if (ref.tail_constant) {
                double tail = std::abs(c)*h + (*ref.tail_constant)*h*(2.0 + std::log(1.0/h));
                out.error_bound += tail + est;
            } else {
                out.error_bound = inf;
            }
        }
    }
    return out;
}

} // namespace dkw
