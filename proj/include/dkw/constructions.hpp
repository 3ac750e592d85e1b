#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "dkw/directions.hpp"
#include "dkw/laws.hpp"
#include "dkw/models.hpp"

namespace dkw {

constexpr std::size_t dimension_cap = std::size_t{1} << 22;

// {sqrt(1-delta^2) e_1 + delta e_k : 2 <= k <= d}
direction_set spiked_set(std::size_t d, double delta);

enum class scenario_case { atom, heavy_tail, variance };

std::string to_string(scenario_case c);
scenario_case parse_scenario_case(const std::string& s);

struct counterexample_scenario {
    scenario_case kind;
    vector_model model;
    direction_set dirs;
    std::size_t m;
    double t_probe;
    double predicted_floor;
    law1d projection_law;                  // exact law shared by every direction
    std::map<std::string, double> params;  // delta, d and case-specific values
};

// Rademacher coordinates, left atom t0 = -1.
counterexample_scenario atom_scenario(std::size_t m, std::optional<std::size_t> dimension = std::nullopt);

// Heavy-tailed coordinates; probe at -2.
counterexample_scenario heavy_tail_scenario(std::size_t m, const law1d& coord,
                                            std::optional<std::size_t> dimension = std::nullopt);

// Uniform cube, delta = 1/sqrt(m), probe at -sqrt3.
counterexample_scenario variance_scenario(std::size_t m, std::optional<std::size_t> dimension = std::nullopt);

} // namespace dkw
