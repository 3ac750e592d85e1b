#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dkw {

class ecdf;

enum class law_family {
    gaussian,
    rademacher,
    laplace,
    uniform,
    pareto,
    discrete,
    trapezoid,
    quadrature,
    scaled,
    oracle,
};

struct atom {
    double value;
    double mass;
};

// One-dimensional reference law. Quantile is the generalized inverse
// inf{t : cdf(t) >= u}.
struct law1d {
    std::string name;
    law_family family = law_family::gaussian;
    std::function<double(double)> cdf;
    std::function<double(double)> cdf_left;  // P(X < t)
    std::function<double(double)> quantile;
    std::optional<double> density_bound;     // empty: unbounded or atomic
    std::optional<double> tail_constant;     // empty: no subexponential tail
    double mean = 0.0;
    double variance = 1.0;
    double scale = 1.0;                      // standard deviation for the gaussian family
    std::vector<atom> atoms;                 // discrete laws, sorted by value
    std::vector<double> kinks;               // points where the cdf is not smooth
    std::shared_ptr<const ecdf> oracle;      // oracle laws
    double resolution = 0.0;                 // 1/n_oracle for oracle laws

    bool is_oracle() const { return family == law_family::oracle; }
    bool is_exact() const { return !is_oracle(); }
    bool is_continuous() const { return atoms.empty() && !oracle; }
    bool is_standard_normal() const { return family == law_family::gaussian && scale == 1.0; }

    // P(|X| >= r) for r > 0.
    double prob_abs_at_least(double r) const;
};

double std_normal_cdf(double t);
double std_normal_pdf(double t);
double std_normal_quantile(double u);

law1d normal_law(double sigma = 1.0);
law1d rademacher_law();
law1d laplace_law();                    // variance 1
law1d uniform_law();                    // U[-sqrt3, sqrt3], variance 1
law1d pareto_law(double kappa = 2.5);   // symmetric, variance 1
law1d discrete_law(std::vector<atom> atoms, std::string name = "discrete");

// Law of c*w.
law1d scaled_law(const law1d& coord, double c);

// Law of a*w' + b*w for independent copies w, w' of coord. No normalization required.
law1d linear_combination_law(const law1d& coord, double a, double b);

// As above, with a^2 + b^2 = 1 enforced.
law1d two_sparse_projection_law(const law1d& coord, double a, double b);

// Look up a shipped coordinate law by name.
law1d coordinate_law_by_name(const std::string& name);

} // namespace dkw
