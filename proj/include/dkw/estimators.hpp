#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "dkw/ecdf.hpp"
#include "dkw/laws.hpp"

namespace dkw {

enum class monotonicity { non_decreasing, non_increasing };

struct monotone_phi {
    std::string name;
    std::function<double(double)> f;
    monotonicity direction = monotonicity::non_decreasing;
    double p = 1.0;
    double beta = 1.0;

    double operator()(double t) const { return f(t); }
};

// Checks monotonicity and |phi(t)| <= beta(1+|t|^p) on 10^3 points of [-50, 50].
bool validate_phi(const monotone_phi& phi);

monotone_phi phi_identity();
monotone_phi phi_signed_square();
monotone_phi phi_relu_square();
monotone_phi phi_indicator(double tau);
// identity | signed-square | relu-square | indicator:<tau>
monotone_phi parse_phi(const std::string& spec);

// E phi(G) for standard normal G, when known in closed form.
std::optional<double> gaussian_target(const monotone_phi& phi);

// Discards ceil(delta m) values per side, divides the rest by m.
double trimmed_mean(std::span<const double> values, double delta);

// Integral over [lo, hi] of phi(F_m^{-1}(u)) du, exact.
double quantile_window_integral(const ecdf& e, const monotone_phi& phi, double lo, double hi);

// Window [sqrt(delta), 1 - sqrt(delta)], delta in (0, 1/100].
double quantile_integral(const ecdf& e, const monotone_phi& phi, double delta);

struct w1_value {
    double value = 0.0;
    double error_bound = 0.0;
};

// int_0^1 |F_m^{-1} - F^{-1}|, midpoint rule on cells split at i/m, k/n_quad and F(x_(i)).
w1_value w1_empirical_vs_law(const ecdf& e, const law1d& ref, std::size_t n_quad = 1000);

double w1_between_ecdfs(const ecdf& a, const ecdf& b);

struct estimate_record {
    std::size_t direction_index = 0;
    std::string phi_name;
    double estimate = 0.0;
    std::optional<double> target;
    std::optional<double> error;
    double delta_used = 0.0;
};

} // namespace dkw
