#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dkw/complexity.hpp"
#include "dkw/directions.hpp"
#include "dkw/errors.hpp"
#include "dkw/harness.hpp"

namespace {

using json = nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dkw::validation_error({"config: cannot open " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw dkw::validation_error({std::string("config: malformed JSON: ") + e.what()});
    }
}

void report(const dkw::experiment_result& res, const std::string& prefix) {
    dkw::write_outputs(res, prefix);
    std::cout << "wrote " << prefix << ".trials.csv, " << prefix << ".summary.csv, " << prefix << ".meta.json\n";
}

int run_config(const json& j, bool force, std::optional<std::size_t> threads) {
    auto cfg = dkw::validate_config(j);
    dkw::run_options opts;
    opts.force = force;
    opts.threads = threads;
    auto res = dkw::run_experiment(cfg, opts);
    report(res, cfg.output);
    return 0;
}

std::size_t set_dimension(const std::string& spec, std::optional<std::size_t> dim) {
    if (dim) return *dim;
    if (spec.rfind("spiked:", 0) == 0) return std::stoull(spec.substr(7, spec.find(',') - 7));
    if (spec.rfind("file:", 0) == 0) return dkw::load_directions(spec.substr(5)).dimension();
    throw dkw::validation_error({"dim: required for set '" + spec + "'"});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uniform DKW simulation lab"};
    app.require_subcommand(1);

    std::string config_path;
    bool force = false;
    std::optional<std::size_t> threads;

    auto* simulate = app.add_subcommand("simulate", "run an experiment config");
    simulate->add_option("--config", config_path, "JSON config file")->required();
    simulate->add_flag("--force", force, "ignore the work budget");
    simulate->add_option("--threads", threads, "worker threads (default: all cores)");

    auto* sweep = app.add_subcommand("sweep", "run a scaling_sweep config");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_flag("--force", force, "ignore the work budget");
    sweep->add_option("--threads", threads, "worker threads");

    std::string set_spec, out_path;
    std::optional<std::size_t> dim;
    std::uint64_t seed = 0;
    auto* complexity = app.add_subcommand("complexity", "complexity functionals of a direction set");
    complexity->add_option("--set", set_spec, "sphere_random:n | spiked:d,delta | basis_pm | axis | file:path")->required();
    complexity->add_option("--out", out_path, "output JSON file")->required();
    complexity->add_option("--dim", dim, "ambient dimension (needed for sphere_random, basis_pm, axis)");
    complexity->add_option("--seed", seed, "seed for random sets");

    std::string scenario, prefix, coord;
    std::size_t m = 0, trials = 100, count = 100, n_mc = 1000000;
    std::optional<std::size_t> dimension;
    auto* counter = app.add_subcommand("counterexample", "lower-bound scenarios");
    counter->add_option("--case", scenario, "atom | heavy-tail | variance")->required();
    counter->add_option("--m", m, "sample size")->required();
    counter->add_option("--trials", trials, "number of trials");
    counter->add_option("--seed", seed, "base seed");
    counter->add_option("--dimension", dimension, "override the scenario dimension");
    counter->add_option("--coord", coord, "heavy-tail coordinate law (pareto[:kappa] | laplace | ...)");
    counter->add_option("--out", prefix, "output prefix")->default_val("counterexample");
    counter->add_flag("--force", force, "ignore the work budget");
    counter->add_option("--threads", threads, "worker threads");

    std::vector<std::string> phis;
    double delta = 0.0;
    auto* estimate = app.add_subcommand("estimate", "monotone-functional estimates over a configured model");
    estimate->add_option("--config", config_path, "JSON config with model, set, m, trials, output")->required();
    estimate->add_option("--phi", phis, "identity | signed-square | relu-square | indicator:<tau>")->required();
    estimate->add_option("--delta", delta, "Delta in (0, 0.01]")->required();
    estimate->add_flag("--force", force, "ignore the work budget");
    estimate->add_option("--threads", threads, "worker threads");

    std::string campaign;
    auto* check = app.add_subcommand("check", "randomized inequality campaign");
    check->add_option("--campaign", campaign, "pert1 | cont1 | symmetric_difference | psi1")->required();
    check->add_option("--count", count, "number of instances");
    check->add_option("--seed", seed, "base seed");
    check->add_option("--n-mc", n_mc, "Monte Carlo size for symmetric_difference");
    check->add_option("--out", prefix, "output prefix")->default_val("checks");
    check->add_flag("--force", force, "ignore the work budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return run_config(read_json_file(config_path), force, threads);
        if (sweep->parsed()) {
            auto j = read_json_file(config_path);
            if (j.is_object() && j.value("experiment", "") != "scaling_sweep")
                throw dkw::validation_error({"experiment: sweep expects scaling_sweep"});
            return run_config(j, force, threads);
        }
        if (complexity->parsed()) {
            auto d = set_dimension(set_spec, dim);
            auto dirs = dkw::build_direction_set(set_spec, d, seed);
            auto j = dkw::complexity_to_json(dkw::analyze_complexity(dirs));
            dkw::write_file_atomic(out_path, j.dump(2) + "\n");
            std::cout << j.dump() << "\n";
            return 0;
        }
        if (counter->parsed()) {
            json j = {{"experiment", "counterexample"}, {"case", scenario}, {"m", m},
                      {"trials", trials},              {"base_seed", seed}, {"output", prefix}};
            if (dimension) j["dimension"] = *dimension;
            if (!coord.empty()) j["model"] = {{"kind", "product"}, {"d", 1}, {"coord", coord}};
            return run_config(j, force, threads);
        }
        if (estimate->parsed()) {
            auto j = read_json_file(config_path);
            if (!j.is_object()) throw dkw::validation_error({"config: must be a JSON object"});
            j["experiment"] = "estimate";
            j["phi"] = phis;
            j["delta"] = delta;
            return run_config(j, force, threads);
        }
        if (check->parsed()) {
            json j = {{"experiment", "check_campaign"}, {"campaign", campaign}, {"trials", count},
                      {"base_seed", seed},            {"n_mc", n_mc},       {"output", prefix}};
            return run_config(j, force, threads);
        }
    } catch (const dkw::validation_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const dkw::budget_error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
