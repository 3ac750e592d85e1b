#include "dkw/constructions.hpp"

#include <cmath>
#include <limits>

#include "dkw/errors.hpp"

namespace dkw {

direction_set spiked_set(std::size_t d, double delta) {
    if (d < 2) throw domain_error("spiked set needs d >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw domain_error("spike size must lie in (0,1)");
    const double a = std::sqrt(1.0 - delta*delta);
    std::vector<sparse_direction> recs;
    recs.reserve(d - 1);
    for (std::size_t k = 1; k < d; ++k) recs.push_back({k, a, delta});
    return direction_set::sparse(d, std::move(recs));
}

std::string to_string(scenario_case c) {
    switch (c) {
    case scenario_case::atom: return "atom";
    case scenario_case::heavy_tail: return "heavy-tail";
    case scenario_case::variance: return "variance";
    }
    return "?";
}

scenario_case parse_scenario_case(const std::string& s) {
    if (s == "atom") return scenario_case::atom;
    if (s == "heavy-tail" || s == "heavy_tail") return scenario_case::heavy_tail;
    if (s == "variance") return scenario_case::variance;
    throw configuration_error("unknown counterexample case '" + s + "'");
}

namespace {

std::size_t pick_dimension(double formula, std::optional<std::size_t> override_d, std::map<std::string, double>& params,
                           const char* hint) {
    params["d_formula"] = formula;
    params["dimension_override"] = override_d ? 1.0 : 0.0;
    if (override_d) {
        if (*override_d < 2) throw domain_error("dimension must be at least 2");
        return *override_d;
    }
    if (!(formula <= static_cast<double>(dimension_cap)))
        throw configuration_error("scenario dimension " + std::to_string(formula) + " exceeds the cap 2^22; " + hint);
    return static_cast<std::size_t>(formula);
}

std::size_t ceil_count(double x) {
    return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

} // namespace

counterexample_scenario atom_scenario(std::size_t m, std::optional<std::size_t> dimension) {
    if (m < 8) throw domain_error("atom scenario needs m >= 8");
    const double eta = 0.5, h_probe = 0.5, beta = 0.5, alpha = 0.1;
    const double eps = beta*eta/(4.0*h_probe);
    const double t0 = -1.0;
    std::map<std::string, double> params;
    std::size_t hits = ceil_count(h_probe*static_cast<double>(m)*(1.0 - eps));
    double formula = std::ceil(4.0*std::pow(beta, -static_cast<double>(hits)));
    std::size_t d = pick_dimension(formula, dimension, params, "use a smaller m");

    double delta = std::min(0.05, 10.0/(4.0*std::log2(static_cast<double>(d)) + 2.0));
    double a = std::sqrt(1.0 - delta*delta);
    if (!(a*t0 - delta*alpha <= t0)) throw configuration_error("spike too large for the atom probe");

    law1d law = two_sparse_projection_law(rademacher_law(), a, delta);
    double f_probe = law.cdf(t0);
    if (!(f_probe <= h_probe - beta*eta/2.0)) throw configuration_error("probe cdf above the atom bound");

    params["delta"] = delta;
    params["d"] = static_cast<double>(d);
    params["eta"] = eta;
    params["beta"] = beta;
    params["alpha"] = alpha;
    params["epsilon"] = eps;
    params["hits_needed"] = static_cast<double>(hits);
    params["F_probe"] = f_probe;
    params["H_probe"] = h_probe;
    params["gamma1_bound"] = 4.0*delta*std::log2(static_cast<double>(d)) + 2.0*delta;
    return {scenario_case::atom,
            vector_model::product(rademacher_law(), d),
            spiked_set(d, delta),
            m,
            t0,
            beta*eta/4.0,
            std::move(law),
            std::move(params)};
}

counterexample_scenario heavy_tail_scenario(std::size_t m, const law1d& coord, std::optional<std::size_t> dimension) {
    if (m < 8) throw domain_error("heavy-tail scenario needs m >= 8");
    if (coord.tail_constant || !coord.is_continuous() || coord.is_oracle())
        throw configuration_error("heavy-tail scenario needs a continuous law without subexponential tail");
    const double l_eff = static_cast<double>(m)/5.0;
    auto gap = [&](double t) {
        double p = coord.cdf(-t);
        return p > 0.0 ? std::log(p) + t/l_eff : -std::numeric_limits<double>::infinity();
    };
    double t = std::nextafter(20.0, 21.0);
    if (gap(t) < 0.0) {
        double lo = t, hi = t;
        while (gap(hi) < 0.0) {
            lo = hi;
            hi *= 1.05;
            if (hi > 1e6) throw configuration_error("no admissible tail level for this law");
        }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5*(lo + hi);
            if (gap(mid) >= 0.0) hi = mid; else lo = mid;
        }
        t = hi;
    }
    const double delta = 2.0/t;
    const double a = std::sqrt(1.0 - delta*delta);
    const double beta = coord.cdf(-t);
    const double floor = 0.1, t_probe = -2.0;
    law1d law = two_sparse_projection_law(coord, a, delta);
    double f_probe = law.cdf(t_probe);
    double markov = law.prob_abs_at_least(2.0);
    if (!(markov <= 0.25)) throw configuration_error("projection law violates the Chebyshev bound");

    std::map<std::string, double> params;
    std::size_t hits = ceil_count((floor + f_probe)*static_cast<double>(m));
    double formula = std::ceil(4.0*std::pow(beta, -static_cast<double>(hits)));
    std::size_t d = pick_dimension(formula, dimension, params, "only very small m are constructible");

    params["t"] = t;
    params["delta"] = delta;
    params["d"] = static_cast<double>(d);
    params["beta"] = beta;
    params["L_eff"] = l_eff;
    params["hits_needed"] = static_cast<double>(hits);
    params["F_probe"] = f_probe;
    params["P_abs_ge_2"] = markov;
    params["literal_d_log10"] = std::log10(4.0) - static_cast<double>(m)*std::log10(beta);
    return {scenario_case::heavy_tail,
            vector_model::product(coord, d),
            spiked_set(d, delta),
            m,
            t_probe,
            floor,
            std::move(law),
            std::move(params)};
}

counterexample_scenario variance_scenario(std::size_t m, std::optional<std::size_t> dimension) {
    auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
    if (m < 100 || root*root != m) throw domain_error("variance scenario needs a perfect square m >= 100");
    const double delta = 1.0/static_cast<double>(root);
    const double a = std::sqrt(1.0 - delta*delta);
    if (!(a*(-1.0 + 0.7*delta) - 0.8*delta <= -1.0))
        throw configuration_error("spike inequality fails for this m");

    std::map<std::string, double> params;
    double exponent = std::ceil(static_cast<double>(root)/3.0);
    double formula = std::pow(10.0, exponent);
    std::size_t d = pick_dimension(formula, dimension, params, "pass an explicit dimension");

    const double t_probe = -std::sqrt(3.0);
    law1d law = two_sparse_projection_law(uniform_law(), a, delta);
    double f = law.cdf(t_probe);
    double sigma2 = f*(1.0 - f);
    params["delta"] = delta;
    params["d"] = static_cast<double>(d);
    params["I_size"] = std::ceil(delta*static_cast<double>(m)/3.0 - 1e-9);
    params["F_probe"] = f;
    params["F_over_delta"] = f/delta;
    params["sigma2"] = sigma2;
    params["sigma2_sqrt_m"] = sigma2*static_cast<double>(root);
    return {scenario_case::variance,
            vector_model::uniform_cube(d),
            spiked_set(d, delta),
            m,
            t_probe,
            delta/12.0,
            std::move(law),
            std::move(params)};
}

} // namespace dkw
