#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dkw/complexity.hpp"
#include "dkw/directions.hpp"
#include "dkw/lemma_checks.hpp"
#include "dkw/models.hpp"

namespace dkw {

struct model_spec {
    std::string kind = "gaussian";
    std::size_t d = 0;
    std::string coord;
};

struct experiment_config {
    std::string experiment;
    std::optional<model_spec> model;
    std::vector<std::string> sets;
    std::vector<std::size_t> m;
    std::vector<double> delta;
    std::size_t trials = 1;
    std::uint64_t base_seed = 0;
    std::size_t oracle = 1000000;
    std::string output;
    std::string scenario;                  // counterexample case
    std::optional<std::size_t> dimension;  // counterexample dimension override
    std::vector<std::string> phi;
    std::size_t n_quad = 1000;
    std::string campaign;
    std::size_t n_mc = 1000000;
    std::size_t threads = 0;               // 0: hardware concurrency
    double budget = 1e12;
    nlohmann::json raw;
};

// Parses and range-checks a JSON config; throws validation_error listing every problem.
experiment_config validate_config(const std::string& json_text);
experiment_config validate_config(const nlohmann::json& j);

vector_model build_model(const model_spec& spec);
// sphere_random:n | spiked:d,delta | basis_pm | axis | file:path
direction_set build_direction_set(const std::string& spec, std::size_t d, std::uint64_t seed);

// A table with named columns; every cell already formatted.
struct table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;
    std::string to_csv() const;
};

struct experiment_result {
    table trials;
    table summary;
    nlohmann::json meta;
};

struct run_options {
    bool force = false;
    std::optional<std::size_t> threads;
};

// Projected floating-point work of a config.
double projected_work(const experiment_config& cfg);

experiment_result run_experiment(const experiment_config& cfg, const run_options& opts = {});

// Writes <prefix>.trials.csv, <prefix>.summary.csv, <prefix>.meta.json atomically.
void write_outputs(const experiment_result& res, const std::string& prefix);

// Named randomized lemma campaigns: pert1, cont1, symmetric_difference, psi1.
std::vector<inequality_check> run_campaign(const std::string& name, std::size_t count, std::uint64_t seed,
                                           std::size_t n_mc = 1000000);
std::vector<std::string> campaign_names();

table checks_table(const std::vector<inequality_check>& checks);

// Least-squares slope of log(y) on log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// Wilson 95% interval for k successes in n.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n);

// (g/m) log^2(e m / g); 0 when g = 0.
double theorem_threshold(double gamma1, std::size_t m);

nlohmann::json complexity_to_json(const complexity_report& rep);

std::string format_double(double v);

// Writes text to path via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& text);

} // namespace dkw
