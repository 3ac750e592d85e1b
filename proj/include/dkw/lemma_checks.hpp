#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "dkw/ecdf.hpp"
#include "dkw/laws.hpp"
#include "dkw/models.hpp"

namespace dkw {

struct inequality_check {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double slack = 0.0;
    double mc_tolerance = 0.0;
    std::map<std::string, double> context;
    std::optional<double> violating_t;  // first violation found by check_psi1
};

// KS(x) <= KS(y) + P(|<X,x-y>| >= r) + P_m(|<X,x-y>| >= r) + 2 r D_y.
inequality_check check_pert1(const sample_batch& sample, std::span<const double> x, std::span<const double> y,
                             const law1d& law_x, const law1d& law_y, const law1d& diff_law, double r);

// Same, with the exact laws taken from the sample's model.
inequality_check check_pert1(const sample_batch& sample, std::span<const double> x, std::span<const double> y,
                             double r);

// KS <= delta + grid deviation.
inequality_check check_cont1(const ecdf& e, const law1d& ref, double delta);

// MC symmetric difference of the u-level sets vs 4(P(|<X,x-y>| >= r) + r D).
inequality_check check_symmetric_difference(const vector_model& model, std::span<const double> x,
                                            std::span<const double> y, double u, double r, std::size_t n_mc,
                                            std::uint64_t seed);

// max over t_grid of P(|Z| >= tL) - 2exp(-t).
inequality_check check_psi1(const law1d& z, double L, std::span<const double> t_grid);

// 0, step, ..., t_max.
std::vector<double> uniform_grid(double t_max, double step);

} // namespace dkw
