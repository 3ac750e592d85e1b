#include "dkw/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dkw/ecdf.hpp"
#include "dkw/errors.hpp"

namespace dkw {

namespace {

const double sqrt3 = std::sqrt(3.0);

void check_unit_open(double u) {
    if (!(u > 0.0 && u < 1.0)) throw domain_error("quantile level must lie in (0,1)");
}

law1d trapezoid_law(double a, double b) {
    double p = sqrt3*std::abs(a), q = sqrt3*std::abs(b);
    if (p < q) std::swap(p, q);
    // density (p+q-|z|)/(4pq) on the ramps, 1/(2p) on the plateau
    auto lower = [p, q](double z) {
        if (z <= -(p + q)) return 0.0;
        if (z <= -(p - q)) { double s = z + p + q; return s*s/(8.0*p*q); }
        return q/(2.0*p) + (z + p - q)/(2.0*p);
    };
    law1d law;
    law.name = "trapezoid";
    law.family = law_family::trapezoid;
    law.cdf = [lower](double z) { return z <= 0.0 ? lower(z) : 1.0 - lower(-z); };
    law.cdf_left = law.cdf;
    law.quantile = [p, q](double u) {
        check_unit_open(u);
        auto lower_q = [p, q](double v) {
            double c = q/(2.0*p);
            if (v <= c) return -(p + q) + std::sqrt(8.0*p*q*v);
            return 2.0*p*v - p;
        };
        return u <= 0.5 ? lower_q(u) : -lower_q(1.0 - u);
    };
    law.density_bound = 1.0/(2.0*p);
    law.tail_constant = 2.0*(std::abs(a) + std::abs(b));
    law.variance = a*a + b*b;
    law.kinks = {-(p + q), -(p - q), p - q, p + q};
    return law;
}

// Globally adaptive Gauss-Kronrod: bisect the worst interval until the summed
// error estimate is below tol. f takes values in [0, 1], so a piece never errs
// by more than its width.
template <class F>
double integrate_abs(const F& f, double lo, double hi, double tol) {
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct piece {
        double lo, hi, value, error;
        bool operator<(const piece& o) const { return error < o.error; }
    };
    auto eval = [&](double a, double b) {
        double err = 0.0;
        double v = gk::integrate(f, a, b, 0, 0.0, &err);
        return piece{a, b, v, std::min(err, b - a)};
    };
    std::priority_queue<piece> heap;
    heap.push(eval(lo, hi));
    double value = heap.top().value, error = heap.top().error;
    for (int it = 0; it < 2000 && error > tol; ++it) {
        piece w = heap.top();
        heap.pop();
        double mid = 0.5*(w.lo + w.hi);
        if (!(mid > w.lo && mid < w.hi)) {
            heap.push({w.lo, w.hi, w.value, 0.0});
            error -= w.error;
            continue;
        }
        piece l = eval(w.lo, mid), r = eval(mid, w.hi);
        value += l.value + r.value - w.value;
        error += l.error + r.error - w.error;
        heap.push(l);
        heap.push(r);
    }
    return value;
}

law1d quadrature_law(const law1d& coord, double a, double b) {
    if (!coord.is_continuous())
        throw configuration_error("quadrature projection law needs a continuous coordinate law");
    double p = a, q = b;
    if (std::abs(p) < std::abs(q)) std::swap(p, q);
    law1d c = coord;
    bool symmetric = true;
    for (double x: {0.1, 0.5, 1.0, 2.0, 5.0})
        symmetric = symmetric && std::abs(c.cdf(x) + c.cdf_left(-x) - 1.0) <= 1e-14;
    auto cdf = [c, p, q, symmetric](double t) {
        // Z = p w1 + q w2; condition on w2 = Q(u).
        auto outer = [&c, p](double s) {
            return p > 0.0 ? c.cdf(s/p) : 1.0 - c.cdf_left(s/p);
        };
        const double top = symmetric ? 0.5 : 1.0;
        auto f = [&](double u) {
            // nodes next to the ends can round onto them
            u = std::clamp(u, std::numeric_limits<double>::min(), std::nextafter(top, 0.0));
            double w = c.quantile(u);
            // symmetric laws: fold u > 1/2 onto 1 - u, where Q(1 - u) = -Q(u)
            return symmetric ? outer(t - q*w) + outer(t + q*w) : outer(t - q*w);
        };
        std::vector<double> cuts{0.0, top};
        for (double k: c.kinks) {
            cuts.push_back(c.cdf(k));
            cuts.push_back(c.cdf((t - p*k)/q));
            if (symmetric) cuts.push_back(c.cdf((p*k - t)/q));
        }
        std::sort(cuts.begin(), cuts.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double lo = std::clamp(cuts[i], 0.0, top), hi = std::clamp(cuts[i + 1], 0.0, top);
            if (hi - lo <= 1e-15) continue;
            total += integrate_abs(f, lo, hi, 1e-10);
        }
        return std::clamp(total, 0.0, 1.0);
    };
    law1d law;
    law.name = "quadrature";
    law.family = law_family::quadrature;
    law.cdf = cdf;
    law.cdf_left = cdf;
    law.quantile = [cdf](double u) {
        check_unit_open(u);
        // strictly increasing cdf: bracket, then TOMS 748 keeping cdf >= u at the upper end
        double lo = -1.0, hi = 1.0;
        while (cdf(lo) >= u && lo > -1e300) lo *= 2.0;
        while (cdf(hi) < u && hi < 1e300) hi *= 2.0;
        std::uintmax_t iters = 200;
        auto g = [&](double x) { return cdf(x) - u; };
        auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
        return g(r.first) >= 0.0 ? r.first : r.second;
    };
    if (coord.density_bound) law.density_bound = *coord.density_bound/std::abs(p);
    if (coord.tail_constant) law.tail_constant = 2.0*(*coord.tail_constant)*(std::abs(a) + std::abs(b));
    law.mean = (a + b)*coord.mean;
    law.variance = (a*a + b*b)*coord.variance;
    return law;
}

} // namespace

double law1d::prob_abs_at_least(double r) const {
    if (!(r > 0.0)) throw domain_error("radius must be positive");
    return std::clamp(cdf(-r) + (1.0 - cdf_left(r)), 0.0, 1.0);
}

double std_normal_cdf(double t) {
    return 0.5*std::erfc(-t/std::numbers::sqrt2);
}

double std_normal_pdf(double t) {
    return std::exp(-0.5*t*t)/std::sqrt(2.0*std::numbers::pi);
}

double std_normal_quantile(double u) {
    check_unit_open(u);
    return -std::numbers::sqrt2*boost::math::erfc_inv(2.0*u);
}

law1d normal_law(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw domain_error("normal scale must be positive");
    law1d law;
    law.name = sigma == 1.0 ? "gaussian" : "normal";
    law.family = law_family::gaussian;
    law.scale = sigma;
    law.cdf = [sigma](double t) { return std_normal_cdf(t/sigma); };
    law.cdf_left = law.cdf;
    law.quantile = [sigma](double u) { return sigma*std_normal_quantile(u); };
    law.density_bound = 1.0/(sigma*std::sqrt(2.0*std::numbers::pi));
    law.tail_constant = std::max(1.0, sigma);
    law.variance = sigma*sigma;
    return law;
}

law1d discrete_law(std::vector<atom> atoms, std::string name) {
    if (atoms.empty()) throw domain_error("discrete law needs at least one atom");
    std::sort(atoms.begin(), atoms.end(), [](const atom& x, const atom& y) { return x.value < y.value; });
    std::vector<atom> merged;
    double total = 0.0;
    for (const atom& a: atoms) {
        if (!(a.mass >= 0.0) || !std::isfinite(a.value)) throw domain_error("bad atom");
        total += a.mass;
        if (!merged.empty() && merged.back().value == a.value) merged.back().mass += a.mass;
        else merged.push_back(a);
    }
    if (std::abs(total - 1.0) > 1e-12) throw domain_error("atom masses must sum to 1");

    std::vector<double> values, cum;
    double run = 0.0;
    for (const atom& a: merged) {
        values.push_back(a.value);
        run += a.mass;
        cum.push_back(run);
    }
    cum.back() = 1.0;

    law1d law;
    law.name = std::move(name);
    law.family = law_family::discrete;
    law.cdf = [values, cum](double t) {
        auto k = std::upper_bound(values.begin(), values.end(), t) - values.begin();
        return k == 0 ? 0.0 : cum[k - 1];
    };
    law.cdf_left = [values, cum](double t) {
        auto k = std::lower_bound(values.begin(), values.end(), t) - values.begin();
        return k == 0 ? 0.0 : cum[k - 1];
    };
    law.quantile = [values, cum](double u) {
        check_unit_open(u);
        auto k = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        return values[std::min<std::size_t>(k, values.size() - 1)];
    };
    double mean = 0.0, second = 0.0;
    for (const atom& a: merged) {
        mean += a.mass*a.value;
        second += a.mass*a.value*a.value;
    }
    law.mean = mean;
    law.variance = second - mean*mean;
    double amax = 0.0;
    for (const atom& a: merged) amax = std::max(amax, std::abs(a.value));
    // P(|w| >= tL) = 0 once tL > max|value|; at smaller t need 1 <= 2e^{-t}.
    law.tail_constant = std::max(1.0, amax/std::numbers::ln2);
    law.atoms = std::move(merged);
    return law;
}

law1d rademacher_law() {
    return discrete_law({{-1.0, 0.5}, {1.0, 0.5}}, "rademacher");
}

law1d laplace_law() {
    const double b = 1.0/std::numbers::sqrt2;
    law1d law;
    law.name = "laplace";
    law.family = law_family::laplace;
    law.cdf = [b](double t) { return t < 0.0 ? 0.5*std::exp(t/b) : 1.0 - 0.5*std::exp(-t/b); };
    law.cdf_left = law.cdf;
    law.quantile = [b](double u) {
        check_unit_open(u);
        return u <= 0.5 ? b*std::log(2.0*u) : -b*std::log(2.0*(1.0 - u));
    };
    law.density_bound = 1.0/(2.0*b);
    law.tail_constant = 1.0;
    law.kinks = {0.0};
    return law;
}

law1d uniform_law() {
    law1d law;
    law.name = "uniform";
    law.family = law_family::uniform;
    law.cdf = [](double t) { return std::clamp((t + sqrt3)/(2.0*sqrt3), 0.0, 1.0); };
    law.cdf_left = law.cdf;
    law.quantile = [](double u) { check_unit_open(u); return -sqrt3 + 2.0*sqrt3*u; };
    law.density_bound = 1.0/(2.0*sqrt3);
    law.tail_constant = 1.0;
    law.kinks = {-sqrt3, sqrt3};
    return law;
}

law1d pareto_law(double kappa) {
    if (!(kappa > 2.0)) throw domain_error("pareto index must exceed 2 for finite variance");
    const double tmin = std::sqrt((kappa - 2.0)/kappa);
    law1d law;
    law.name = "pareto";
    law.family = law_family::pareto;
    law.cdf = [kappa, tmin](double t) {
        if (t <= -tmin) return 0.5*std::pow(-t/tmin, -kappa);
        if (t < tmin) return 0.5;
        return 1.0 - 0.5*std::pow(t/tmin, -kappa);
    };
    law.cdf_left = law.cdf;
    law.quantile = [kappa, tmin](double u) {
        check_unit_open(u);
        if (u <= 0.5) return -tmin*std::pow(2.0*u, -1.0/kappa);
        return tmin*std::pow(2.0*(1.0 - u), -1.0/kappa);
    };
    law.density_bound = 0.5*kappa/tmin;
    law.kinks = {-tmin, tmin};
    return law;
}

law1d scaled_law(const law1d& coord, double c) {
    if (!std::isfinite(c)) throw domain_error("scale must be finite");
    if (c == 0.0) return discrete_law({{0.0, 1.0}}, "zero");
    if (!coord.atoms.empty()) {
        std::vector<atom> atoms;
        for (const atom& a: coord.atoms) atoms.push_back({c*a.value, a.mass});
        return discrete_law(std::move(atoms), coord.name);
    }
    if (coord.is_oracle()) throw configuration_error("cannot rescale an oracle law");
    if (coord.family == law_family::gaussian) return normal_law(coord.scale*std::abs(c));
    if (c == 1.0) return coord;

    // Shipped continuous laws are symmetric, so c < 0 acts like |c|.
    double s = std::abs(c);
    law1d law = coord;
    law.name = coord.name;
    law.family = law_family::scaled;
    law.cdf = [f = coord.cdf, s](double t) { return f(t/s); };
    law.cdf_left = [f = coord.cdf_left, s](double t) { return f(t/s); };
    law.quantile = [q = coord.quantile, s](double u) { return s*q(u); };
    if (coord.density_bound) law.density_bound = *coord.density_bound/s;
    if (coord.tail_constant) law.tail_constant = std::max(1.0, *coord.tail_constant*s);
    law.mean = c*coord.mean;
    law.variance = c*c*coord.variance;
    for (double& k: law.kinks) k *= s;
    return law;
}

law1d linear_combination_law(const law1d& coord, double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw domain_error("coefficients must be finite");
    if (coord.is_oracle()) throw configuration_error("projection law needs an exact coordinate law");
    if (b == 0.0) return scaled_law(coord, a);
    if (a == 0.0) return scaled_law(coord, b);
    if (coord.family == law_family::gaussian) return normal_law(coord.scale*std::hypot(a, b));
    if (!coord.atoms.empty()) {
        std::vector<atom> atoms;
        for (const atom& x: coord.atoms)
            for (const atom& y: coord.atoms) atoms.push_back({a*x.value + b*y.value, x.mass*y.mass});
        double total = 0.0;
        for (const atom& x: atoms) total += x.mass;
        for (atom& x: atoms) x.mass /= total;
        return discrete_law(std::move(atoms), coord.name + "_pair");
    }
    if (coord.family == law_family::uniform) return trapezoid_law(a, b);
    return quadrature_law(coord, a, b);
}

law1d two_sparse_projection_law(const law1d& coord, double a, double b) {
    if (!(std::abs(a*a + b*b - 1.0) <= 1e-9)) throw domain_error("two-sparse coefficients must satisfy a^2+b^2=1");
    return linear_combination_law(coord, a, b);
}

law1d coordinate_law_by_name(const std::string& name) {
    if (name == "gaussian") return normal_law(1.0);
    if (name == "rademacher") return rademacher_law();
    if (name == "laplace") return laplace_law();
    if (name == "uniform") return uniform_law();
    if (name == "pareto") return pareto_law(2.5);
    if (name.rfind("pareto:", 0) == 0) return pareto_law(std::stod(name.substr(7)));
    throw configuration_error("unknown coordinate law '" + name + "'");
}

} // namespace dkw
