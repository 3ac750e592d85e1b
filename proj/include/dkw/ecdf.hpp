#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dkw/laws.hpp"

namespace dkw {

// Right-continuous empirical distribution function of m values.
class ecdf {
public:
    explicit ecdf(std::vector<double> values);

    std::size_t size() const { return sorted_.size(); }
    std::span<const double> sorted_values() const { return sorted_; }
    double order_statistic(std::size_t i) const { return sorted_.at(i - 1); }  // 1-based

    double eval(double t) const;        // #{x <= t}/m
    double eval_left(double t) const;   // #{x < t}/m
    double quantile(double u) const;    // x_(ceil(u m)), u in (0,1]

private:
    std::vector<double> sorted_;
};

ecdf build_ecdf(std::span<const double> values);

enum class limit_side { left, right };

struct deviation_report {
    double sup_deviation = 0.0;
    double argmax_t = 0.0;
    limit_side side = limit_side::right;
    double sigma_at_argmax = 0.0;
};

// Exact sup_t |F_m(t) - F(t)|. Atom-aware; oracle references use a two-pointer merge.
deviation_report ks_sup_deviation(const ecdf& e, const law1d& ref);

// Exact sup distance between two step functions.
deviation_report ks_between(const ecdf& a, const ecdf& b);

// {l*delta : 1 <= l <= (1-delta)/delta}; no range check.
std::vector<double> grid_levels(double delta);

// max over the grid of |F_m(F^{-1}(u)) - u|, delta in (0, 1/4).
double grid_deviation(const ecdf& e, const law1d& ref, double delta);

struct pointwise {
    double empirical;
    double reference;
    double sigma;
};

pointwise pointwise_deviation(const ecdf& e, const law1d& ref, double t);

// Cubic Hermite table of the standard normal cdf; |error| < 1e-12.
class normal_cdf_table {
public:
    static const normal_cdf_table& instance();
    double operator()(double t) const {
        double s = (t + range)*inv_h;
        if (!(s >= 0.0) || s >= static_cast<double>(cells)) return tail(t);
        auto i = static_cast<std::size_t>(s);
        double x = s - static_cast<double>(i);
        const double* c = &coef_[4*i];
        return c[0] + x*(c[1] + x*(c[2] + x*c[3]));
    }

    static constexpr double range = 8.5;
    static constexpr double h = 1.0/256.0;
    static constexpr double inv_h = 256.0;
    static constexpr std::size_t cells = 2*8*256 + 256;  // 2*range/h

private:
    normal_cdf_table();
    static double tail(double t);
    std::vector<double> coef_;  // Hermite cubic per cell, in powers of the cell offset
};

// Reusable buffers for unsorted KS evaluation.
struct ks_workspace {
    std::vector<double> u;                   // cdf of each value
    std::vector<std::uint32_t> count;        // per cell of width 1/m
    std::vector<std::array<double, 2>> ext;  // smallest and largest u per cell
    std::vector<double> scratch;
};

// Exact KS of unsorted values against ref. O(m) for continuous exact laws,
// sorting otherwise.
deviation_report ks_sup_deviation_unsorted(std::span<const double> values, const law1d& ref, ks_workspace& ws);

} // namespace dkw
