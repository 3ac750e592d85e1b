#include "dkw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <boost/random/normal_distribution.hpp>
#include <boost/version.hpp>

#include "dkw/constructions.hpp"
#include "dkw/errors.hpp"
#include "dkw/estimators.hpp"
#include "dkw/linear_class.hpp"
#include "dkw/rng.hpp"

namespace dkw {

validation_error::validation_error(std::vector<std::string> problems)
    : std::runtime_error([&] {
          std::string msg = "invalid config:";
          for (const auto& p: problems) msg += "\n  " + p;
          return msg;
      }()),
      problems_(std::move(problems)) {}

budget_error::budget_error(double projected_flops, double budget)
    : std::runtime_error("projected work " + format_double(projected_flops) + " flops exceeds the budget " +
                         format_double(budget) + "; rerun with --force to override"),
      projected_(projected_flops) {}

namespace {

using json = nlohmann::json;

const std::uint64_t oracle_stream = 0x0a11ce5eedull;
const char* const version = "1.0.0";

const std::set<std::string> experiments = {"single_dkw", "class_sup", "scaling_sweep", "counterexample",
                                           "estimate",   "w1",        "check_campaign"};

bool is_sup_experiment(const std::string& e) {
    return e == "single_dkw" || e == "class_sup" || e == "scaling_sweep";
}

struct set_spec {
    std::string kind;
    std::size_t n = 0;
    std::size_t d = 0;
    double delta = 0.0;
    std::string path;
};

set_spec parse_set_spec(const std::string& spec) {
    set_spec s;
    auto colon = spec.find(':');
    s.kind = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto to_size = [&](const std::string& t) {
        std::size_t used = 0;
        long long v = std::stoll(t, &used);
        if (used != t.size() || v <= 0) throw std::invalid_argument("bad count");
        return static_cast<std::size_t>(v);
    };
    try {
        if (s.kind == "sphere_random") {
            s.n = to_size(arg);
        } else if (s.kind == "spiked") {
            auto comma = arg.find(',');
            if (comma == std::string::npos) throw std::invalid_argument("missing delta");
            s.d = to_size(arg.substr(0, comma));
            std::size_t used = 0;
            std::string ds = arg.substr(comma + 1);
            s.delta = std::stod(ds, &used);
            if (used != ds.size()) throw std::invalid_argument("bad delta");
        } else if (s.kind == "file") {
            if (arg.empty()) throw std::invalid_argument("missing path");
            s.path = arg;
        } else if (s.kind == "basis_pm" || s.kind == "axis") {
            if (!arg.empty()) throw std::invalid_argument("unexpected argument");
        } else {
            throw std::invalid_argument("unknown kind");
        }
    } catch (const std::exception&) {
        throw configuration_error("bad set spec '" + spec +
                                  "' (expected sphere_random:n | spiked:d,delta | basis_pm | axis | file:path)");
    }
    return s;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t: pool) t.join();
    if (error) std::rethrow_exception(error);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n/2] : 0.5*(v[n/2 - 1] + v[n/2]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    return std::accumulate(v.begin(), v.end(), 0.0)/static_cast<double>(v.size());
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(std::uint64_t v, int) { return std::to_string(v); }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::size_t resolve_threads(const experiment_config& cfg, const run_options& opts) {
    std::size_t t = opts.threads.value_or(cfg.threads);
    if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
    return t;
}

json base_meta(const experiment_config& cfg) {
    json meta;
    meta["config"] = cfg.raw;
    meta["version"] = version;
    meta["versions"] = {{"dkw", version},
                        {"boost", std::to_string(BOOST_VERSION/100000) + "." + std::to_string(BOOST_VERSION/100%1000) +
                                      "." + std::to_string(BOOST_VERSION%100)},
                        {"compiler", __VERSION__}};
    meta["n_oracle"] = cfg.oracle;
    meta["log_base"] = "natural";
    meta["seed_rule"] = "trial seed = base_seed XOR splitmix64(trial_index); column j of a sample uses "
                        "splitmix64-derived stream (seed, j)";
    return meta;
}

std::unique_ptr<column_source> make_source(const vector_model& model, const direction_set& dirs, std::size_t m,
                                           std::uint64_t seed) {
    if (dirs.is_sparse()) return std::make_unique<streamed_sample>(model, m, seed);
    return std::make_unique<sample_batch>(sample(model, m, seed));
}

std::string reference_kind_name(reference_kind k) {
    return k == reference_kind::exact ? "exact" : "oracle";
}

experiment_result run_sup(const experiment_config& cfg, std::size_t threads) {
    const auto model = build_model(*cfg.model);
    experiment_result res;
    res.trials.columns = {"set",     "trial_index",      "seed_used",           "m",           "n_directions",
                          "sup_deviation", "argmax_direction", "exceeded_sqrt_delta", "wall_time_ms"};
    res.summary.columns = {"set",           "m",
                           "delta",         "trials",
                           "n_directions",  "exceedances",
                           "exceedance_frequency", "ci_low",
                           "ci_high",       "median_sup_deviation",
                           "mean_sup_deviation", "gamma1_upper",
                           "theorem_threshold", "sudakov_value",
                           "sqrt_gamma1_over_m", "dkw_bound",
                           "fitted_slope",  "reference_kind"};
    json meta = base_meta(cfg);
    meta["sets"] = json::array();
    const auto start = std::chrono::steady_clock::now();

    for (const auto& spec: cfg.sets) {
        auto dirs = build_direction_set(spec, model.dimension, cfg.base_seed);
        auto refs = resolve_reference_laws(model, dirs, cfg.oracle, derive_seed(cfg.base_seed, oracle_stream));
        auto comp = analyze_complexity(dirs);
        std::vector<double> medians;
        std::vector<std::vector<std::string>> pending;
        for (std::size_t m: cfg.m) {
            const std::size_t T = cfg.trials;
            std::vector<double> sup(T), wall(T);
            std::vector<std::size_t> arg(T);
            parallel_for(T, threads, [&](std::size_t t) {
                auto t0 = std::chrono::steady_clock::now();
                auto src = make_source(model, dirs, m, trial_seed(cfg.base_seed, t));
                auto rep = class_sup_ks(*src, dirs, refs);
                sup[t] = rep.sup_over_class;
                arg[t] = rep.argmax_direction;
                wall[t] = elapsed_ms(t0);
            });
            for (std::size_t t = 0; t < T; ++t) {
                std::string flags;
                for (std::size_t k = 0; k < cfg.delta.size(); ++k) {
                    if (k) flags += ';';
                    flags += sup[t] > std::sqrt(cfg.delta[k]) ? '1' : '0';
                }
                res.trials.rows.push_back({spec, fmt(t), fmt(trial_seed(cfg.base_seed, t), 0), fmt(m),
                                           fmt(dirs.size()), fmt(sup[t]), fmt(arg[t]), flags, fmt(wall[t])});
            }
            double med = median_of(sup);
            medians.push_back(med);
            double thr = theorem_threshold(comp.gamma1_upper, m);
            double sud = std::sqrt(comp.gamma1_entropy_sup/static_cast<double>(m));
            for (double dl: cfg.delta) {
                std::size_t k = 0;
                for (double s: sup) k += s > std::sqrt(dl);
                auto [lo, hi] = wilson_interval(k, T);
                pending.push_back({spec, fmt(m), fmt(dl), fmt(T), fmt(dirs.size()), fmt(k),
                                   fmt(static_cast<double>(k)/static_cast<double>(T)), fmt(lo), fmt(hi), fmt(med),
                                   fmt(mean_of(sup)), fmt(comp.gamma1_upper), fmt(thr), fmt(sud),
                                   fmt(std::sqrt(comp.gamma1_upper/static_cast<double>(m))),
                                   fmt(std::min(1.0, 2.0*std::exp(-2.0*dl*static_cast<double>(m)))), "",
                                   reference_kind_name(refs.kind())});
            }
        }
        std::vector<double> ms(cfg.m.begin(), cfg.m.end());
        double slope = ms.size() >= 2 ? log_log_slope(ms, medians) : std::nan("");
        for (auto& row: pending) {
            row[16] = fmt(slope);
            res.summary.rows.push_back(std::move(row));
        }
        json sj;
        sj["set"] = spec;
        sj["n_directions"] = dirs.size();
        sj["reference_kind"] = reference_kind_name(refs.kind());
        sj["complexity"] = complexity_to_json(comp);
        sj["fitted_slope"] = std::isfinite(slope) ? json(slope) : json(nullptr);
        sj["medians"] = medians;
        meta["sets"].push_back(sj);
    }
    meta["wall_time_ms"] = elapsed_ms(start);
    res.meta = std::move(meta);
    return res;
}

experiment_result run_counterexample(const experiment_config& cfg, std::size_t threads) {
    const std::size_t m = cfg.m.front();
    auto kind = parse_scenario_case(cfg.scenario);
    auto scenario = [&] {
        switch (kind) {
        case scenario_case::atom: return atom_scenario(m, cfg.dimension);
        case scenario_case::heavy_tail: {
            law1d coord = cfg.model && cfg.model->kind == "product" ? coordinate_law_by_name(cfg.model->coord)
                                                                    : pareto_law(2.5);
            return heavy_tail_scenario(m, coord, cfg.dimension);
        }
        case scenario_case::variance: return variance_scenario(m, cfg.dimension);
        }
        throw configuration_error("unknown scenario");
    }();
    auto refs = reference_laws::shared(scenario.projection_law);
    const std::size_t T = cfg.trials;
    std::vector<double> dev(T), wall(T);
    std::vector<std::size_t> arg(T);
    auto start = std::chrono::steady_clock::now();
    parallel_for(T, threads, [&](std::size_t t) {
        auto t0 = std::chrono::steady_clock::now();
        streamed_sample src(scenario.model, m, trial_seed(cfg.base_seed, t));
        auto rep = pointwise_class_deviation(src, scenario.dirs, refs, scenario.t_probe);
        dev[t] = rep.sup_deviation;
        arg[t] = scenario.dirs.record(rep.argmax_direction).axis + 1;
        wall[t] = elapsed_ms(t0);
    });

    experiment_result res;
    res.trials.columns = {"trial", "seed_used", "sup_pointwise_deviation", "predicted_floor", "argmax_k",
                          "wall_time_ms"};
    std::size_t above = 0, above_half = 0;
    for (std::size_t t = 0; t < T; ++t) {
        above += dev[t] >= scenario.predicted_floor;
        above_half += dev[t] >= scenario.predicted_floor/2.0;
        res.trials.rows.push_back({fmt(t), fmt(trial_seed(cfg.base_seed, t), 0), fmt(dev[t]),
                                   fmt(scenario.predicted_floor), fmt(arg[t]), fmt(wall[t])});
    }
    res.summary.columns = {"case",  "m", "d", "delta", "trials", "predicted_floor", "t_probe", "F_probe",
                           "frequency_at_floor", "frequency_at_half_floor", "median_sup_pointwise_deviation"};
    res.summary.rows.push_back({to_string(kind), fmt(m), fmt(scenario.dirs.dimension()),
                                fmt(scenario.params.at("delta")), fmt(T), fmt(scenario.predicted_floor),
                                fmt(scenario.t_probe), fmt(scenario.params.at("F_probe")),
                                fmt(static_cast<double>(above)/static_cast<double>(T)),
                                fmt(static_cast<double>(above_half)/static_cast<double>(T)), fmt(median_of(dev))});
    json meta = base_meta(cfg);
    json sc;
    sc["case"] = to_string(kind);
    sc["m"] = m;
    sc["t_probe"] = scenario.t_probe;
    sc["predicted_floor"] = scenario.predicted_floor;
    sc["model"] = scenario.model.describe();
    sc["n_directions"] = scenario.dirs.size();
    for (const auto& [k, v]: scenario.params) sc["params"][k] = v;
    meta["scenario"] = sc;
    meta["wall_time_ms"] = elapsed_ms(start);
    res.meta = std::move(meta);
    return res;
}

experiment_result run_estimate(const experiment_config& cfg, std::size_t threads) {
    const auto model = build_model(*cfg.model);
    const auto dirs = build_direction_set(cfg.sets.front(), model.dimension, cfg.base_seed);
    const std::size_t m = cfg.m.front();
    const double delta = cfg.delta.front();
    std::vector<monotone_phi> phis;
    for (const auto& p: cfg.phi) phis.push_back(parse_phi(p));
    std::vector<std::optional<double>> targets;
    for (const auto& p: phis)
        targets.push_back(model.kind == model_kind::gaussian ? gaussian_target(p) : std::nullopt);

    const std::size_t T = cfg.trials, n = dirs.size(), np = phis.size();
    std::vector<double> est(T*n*np);
    parallel_for(T, threads, [&](std::size_t t) {
        auto src = make_source(model, dirs, m, trial_seed(cfg.base_seed, t));
        std::vector<double> y(m);
        for (std::size_t i = 0; i < n; ++i) {
            project_into(*src, dirs, i, y);
            ecdf e(y);
            for (std::size_t k = 0; k < np; ++k) est[(t*n + i)*np + k] = quantile_integral(e, phis[k], delta);
        }
    });

    experiment_result res;
    res.trials.columns = {"trial", "direction_index", "phi_name", "estimate", "target", "error", "delta_used"};
    std::vector<double> max_err(np, 0.0), sum_err(np, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < np; ++k) {
                double e = est[(t*n + i)*np + k];
                std::string target = "unknown", error = "n/a";
                if (targets[k]) {
                    double err = std::abs(e - *targets[k]);
                    max_err[k] = std::max(max_err[k], err);
                    sum_err[k] += err;
                    target = fmt(*targets[k]);
                    error = fmt(err);
                }
                res.trials.rows.push_back({fmt(t), fmt(i), phis[k].name, fmt(e), target, error, fmt(delta)});
            }
        }
    }
    res.summary.columns = {"phi_name", "trials", "n_directions", "m", "delta_used", "max_abs_error",
                           "mean_abs_error", "sqrt_delta_log2"};
    const double scale = std::sqrt(delta)*std::pow(std::log(std::exp(1.0)/delta), 2.0);
    for (std::size_t k = 0; k < np; ++k) {
        bool known = targets[k].has_value();
        res.summary.rows.push_back({phis[k].name, fmt(T), fmt(n), fmt(m), fmt(delta),
                                    known ? fmt(max_err[k]) : "n/a",
                                    known ? fmt(sum_err[k]/static_cast<double>(T*n)) : "n/a", fmt(scale)});
    }
    res.meta = base_meta(cfg);
    return res;
}

experiment_result run_w1(const experiment_config& cfg, std::size_t threads) {
    const auto model = build_model(*cfg.model);
    const auto dirs = build_direction_set(cfg.sets.front(), model.dimension, cfg.base_seed);
    auto refs = resolve_reference_laws(model, dirs, cfg.oracle, derive_seed(cfg.base_seed, oracle_stream));
    experiment_result res;
    res.trials.columns = {"trial_index", "seed_used", "m", "n_directions", "sup_w1", "argmax_direction",
                          "error_bound", "w1_sqrt_m", "wall_time_ms"};
    res.summary.columns = {"m", "trials", "median_sup_w1", "mean_sup_w1", "median_w1_sqrt_m", "reference_kind"};
    for (std::size_t m: cfg.m) {
        const std::size_t T = cfg.trials;
        std::vector<double> w(T), bound(T), wall(T);
        std::vector<std::size_t> arg(T);
        parallel_for(T, threads, [&](std::size_t t) {
            auto t0 = std::chrono::steady_clock::now();
            auto src = make_source(model, dirs, m, trial_seed(cfg.base_seed, t));
            std::vector<double> y(m);
            w[t] = -1.0;
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                project_into(*src, dirs, i, y);
                auto v = w1_empirical_vs_law(ecdf(y), refs.for_direction(i), cfg.n_quad);
                if (v.value > w[t]) {
                    w[t] = v.value;
                    bound[t] = v.error_bound;
                    arg[t] = i;
                }
            }
            wall[t] = elapsed_ms(t0);
        });
        std::vector<double> scaled(T);
        for (std::size_t t = 0; t < T; ++t) {
            scaled[t] = w[t]*std::sqrt(static_cast<double>(m));
            res.trials.rows.push_back({fmt(t), fmt(trial_seed(cfg.base_seed, t), 0), fmt(m), fmt(dirs.size()),
                                       fmt(w[t]), fmt(arg[t]), fmt(bound[t]), fmt(scaled[t]), fmt(wall[t])});
        }
        res.summary.rows.push_back({fmt(m), fmt(T), fmt(median_of(w)), fmt(mean_of(w)), fmt(median_of(scaled)),
                                    reference_kind_name(refs.kind())});
    }
    res.meta = base_meta(cfg);
    return res;
}

experiment_result run_check(const experiment_config& cfg) {
    auto checks = run_campaign(cfg.campaign, cfg.trials, cfg.base_seed, cfg.n_mc);
    experiment_result res;
    res.trials = checks_table(checks);
    std::size_t holds = 0;
    for (const auto& c: checks) holds += c.holds;
    res.summary.columns = {"campaign", "checks", "holds", "failures"};
    res.summary.rows.push_back({cfg.campaign, fmt(checks.size()), fmt(holds), fmt(checks.size() - holds)});
    res.meta = base_meta(cfg);
    return res;
}

// ---- config validation ----

struct validator {
    std::vector<std::string> problems;

    void fail(const std::string& field, const std::string& what) { problems.push_back(field + ": " + what); }

    std::optional<std::uint64_t> count(const json& j, const std::string& key, std::uint64_t min_value) {
        if (!j.contains(key)) return std::nullopt;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
            fail(key, "must be a non-negative integer");
            return std::nullopt;
        }
        auto x = v.get<std::uint64_t>();
        if (x < min_value) {
            fail(key, "must be >= " + std::to_string(min_value));
            return std::nullopt;
        }
        return x;
    }

    std::vector<std::uint64_t> counts(const json& j, const std::string& key, std::uint64_t min_value) {
        std::vector<std::uint64_t> out;
        if (!j.contains(key)) return out;
        json arr = j.at(key).is_array() ? j.at(key) : json::array({j.at(key)});
        if (arr.empty()) fail(key, "must not be empty");
        for (const auto& v: arr) {
            if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0) ||
                v.get<std::uint64_t>() < min_value) {
                fail(key, "entries must be integers >= " + std::to_string(min_value));
                return {};
            }
            out.push_back(v.get<std::uint64_t>());
        }
        return out;
    }

    std::vector<double> reals(const json& j, const std::string& key) {
        std::vector<double> out;
        if (!j.contains(key)) return out;
        json arr = j.at(key).is_array() ? j.at(key) : json::array({j.at(key)});
        if (arr.empty()) fail(key, "must not be empty");
        for (const auto& v: arr) {
            if (!v.is_number()) {
                fail(key, "entries must be numbers");
                return {};
            }
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const json& j, const std::string& key) {
        std::vector<std::string> out;
        if (!j.contains(key)) return out;
        json arr = j.at(key).is_array() ? j.at(key) : json::array({j.at(key)});
        if (arr.empty()) fail(key, "must not be empty");
        for (const auto& v: arr) {
            if (!v.is_string()) {
                fail(key, "entries must be strings");
                return {};
            }
            out.push_back(v.get<std::string>());
        }
        return out;
    }
};

} // namespace

// ---- public helpers ----

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t table::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw configuration_error("no column named " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c: s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string table::to_csv() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << csv_cell(columns[k]);
    os << '\n';
    for (const auto& row: rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_cell(row[k]);
        os << '\n';
    }
    return os.str();
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw domain_error("slope needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx*lx;
        sxy += lx*ly;
    }
    return (n*sxy - sx*sy)/(n*sxx - sx*sx);
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n), p = static_cast<double>(k)/nn;
    const double denom = 1.0 + z*z/nn;
    const double center = (p + z*z/(2.0*nn))/denom;
    const double half = z*std::sqrt(p*(1.0 - p)/nn + z*z/(4.0*nn*nn))/denom;
    return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

double theorem_threshold(double gamma1, std::size_t m) {
    if (!(gamma1 > 0.0)) return 0.0;
    const double md = static_cast<double>(m);
    double l = std::log(std::exp(1.0)*md/gamma1);
    return gamma1/md*l*l;
}

nlohmann::json complexity_to_json(const complexity_report& rep) {
    json j;
    j["gamma1_upper"] = rep.gamma1_upper;
    j["gamma2_upper"] = rep.gamma2_upper;
    j["gamma1_entropy_sup"] = rep.gamma1_entropy_sup;
    j["entropy_integral_1"] = rep.entropy_integral_1;
    j["cover_sizes"] = json::object();
    for (const auto& [scale, n]: rep.cover_sizes) j["cover_sizes"][format_double(scale)] = n;
    j["diameter"] = rep.diameter;
    j["maximizing_scale"] = rep.maximizing_scale;
    j["n_points"] = rep.n_points;
    j["log_base"] = "natural";
    return j;
}

void write_file_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw configuration_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw configuration_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_outputs(const experiment_result& res, const std::string& prefix) {
    write_file_atomic(prefix + ".trials.csv", res.trials.to_csv());
    write_file_atomic(prefix + ".summary.csv", res.summary.to_csv());
    write_file_atomic(prefix + ".meta.json", res.meta.dump(2) + "\n");
}

vector_model build_model(const model_spec& spec) {
    if (spec.d == 0) throw configuration_error("model dimension must be positive");
    if (spec.kind == "gaussian") return vector_model::gaussian(spec.d);
    if (spec.kind == "uniform_cube") return vector_model::uniform_cube(spec.d);
    if (spec.kind == "product") return vector_model::product(coordinate_law_by_name(spec.coord), spec.d);
    throw configuration_error("unsupported model kind '" + spec.kind + "'");
}

direction_set build_direction_set(const std::string& spec, std::size_t d, std::uint64_t seed) {
    auto s = parse_set_spec(spec);
    if (s.kind == "sphere_random") return random_sphere_directions(d, s.n, seed);
    if (s.kind == "spiked") {
        if (s.d != d) throw configuration_error("spiked set dimension differs from the model dimension");
        return spiked_set(s.d, s.delta);
    }
    if (s.kind == "basis_pm") return basis_pm(d);
    if (s.kind == "axis") return axis_direction(d, 0);
    auto dirs = load_directions(s.path);
    if (dirs.dimension() != d) throw configuration_error("direction file dimension differs from the model dimension");
    return dirs;
}

experiment_config validate_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw validation_error({std::string("malformed JSON: ") + e.what()});
    }
    return validate_config(j);
}

experiment_config validate_config(const nlohmann::json& j) {
    validator v;
    experiment_config cfg;
    if (!j.is_object()) throw validation_error({"config: must be a JSON object"});
    cfg.raw = j;
    static const std::set<std::string> keys = {"experiment", "model", "set",  "m",       "delta",  "trials",
                                               "base_seed",  "oracle", "output", "case",  "dimension", "phi",
                                               "n_quad",     "campaign", "n_mc", "threads", "budget"};
    for (const auto& [key, _]: j.items())
        if (!keys.count(key)) v.fail(key, "unknown key");

    if (!j.contains("experiment") || !j["experiment"].is_string()) {
        v.fail("experiment", "required, one of single_dkw|class_sup|scaling_sweep|counterexample|estimate|w1|check_campaign");
    } else {
        cfg.experiment = j["experiment"].get<std::string>();
        if (!experiments.count(cfg.experiment))
            v.fail("experiment", "must be one of single_dkw|class_sup|scaling_sweep|counterexample|estimate|w1|check_campaign");
    }
    const std::string& ex = cfg.experiment;

    if (j.contains("model")) {
        const auto& mj = j["model"];
        if (!mj.is_object()) {
            v.fail("model", "must be an object");
        } else {
            model_spec ms;
            for (const auto& [key, _]: mj.items())
                if (key != "kind" && key != "d" && key != "coord") v.fail("model." + key, "unknown key");
            if (!mj.contains("kind") || !mj["kind"].is_string()) {
                v.fail("model.kind", "required, one of gaussian|product|uniform_cube");
            } else {
                ms.kind = mj["kind"].get<std::string>();
                if (ms.kind != "gaussian" && ms.kind != "product" && ms.kind != "uniform_cube")
                    v.fail("model.kind", "must be one of gaussian|product|uniform_cube");
            }
            if (auto d = v.count(mj, "d", 1)) ms.d = *d;
            else if (!mj.contains("d")) v.fail("model.d", "required positive integer");
            if (ms.kind == "product") {
                if (!mj.contains("coord") || !mj["coord"].is_string()) {
                    v.fail("model.coord", "required for product models");
                } else {
                    ms.coord = mj["coord"].get<std::string>();
                    try {
                        coordinate_law_by_name(ms.coord);
                    } catch (const std::exception&) {
                        v.fail("model.coord", "must be one of gaussian|rademacher|laplace|uniform|pareto[:kappa]");
                    }
                }
            } else if (mj.contains("coord")) {
                v.fail("model.coord", "only allowed for product models");
            }
            cfg.model = ms;
        }
    } else if (ex != "counterexample" && ex != "check_campaign" && experiments.count(ex)) {
        v.fail("model", "required for " + ex);
    }

    cfg.sets = v.strings(j, "set");
    if (cfg.sets.empty() && !j.contains("set")) cfg.sets = {"axis"};
    for (const auto& s: cfg.sets) {
        try {
            auto spec = parse_set_spec(s);
            if (spec.kind == "spiked") {
                if (!(spec.delta > 0.0 && spec.delta < 1.0)) v.fail("set", "spiked delta must lie in (0,1)");
                if (spec.d < 2) v.fail("set", "spiked d must be >= 2");
                if (cfg.model && cfg.model->d != spec.d) v.fail("set", "spiked d must equal model.d");
            }
            if (spec.kind == "file" && !std::filesystem::exists(spec.path)) v.fail("set", "file " + spec.path + " does not exist");
        } catch (const std::exception& e) {
            v.fail("set", e.what());
        }
    }
    if (ex != "scaling_sweep" && cfg.sets.size() > 1 && ex != "class_sup")
        v.fail("set", "only scaling_sweep and class_sup accept several sets");

    auto ms = v.counts(j, "m", 1);
    cfg.m.assign(ms.begin(), ms.end());
    if (!j.contains("m") && ex != "check_campaign") v.fail("m", "required positive integer (or list)");
    if (ex == "scaling_sweep" && !cfg.m.empty()) {
        auto [lo, hi] = std::minmax_element(cfg.m.begin(), cfg.m.end());
        if (cfg.m.size() < 3 || static_cast<double>(*hi) < 10.0*static_cast<double>(*lo))
            v.fail("m", "scaling_sweep needs >= 3 values spanning at least one decade");
    }
    if ((ex == "counterexample" || ex == "estimate") && cfg.m.size() > 1) v.fail("m", "must be a single value for " + ex);

    cfg.delta = v.reals(j, "delta");
    for (double d: cfg.delta) {
        if (!(d > 0.0 && d < 1.0)) {
            v.fail("delta", "values must lie in (0,1)");
            break;
        }
    }
    if (is_sup_experiment(ex) && !j.contains("delta")) v.fail("delta", "required list of values in (0,1)");
    if (ex == "estimate") {
        if (cfg.delta.size() != 1) v.fail("delta", "estimate needs a single value in (0, 0.01]");
        else if (!(cfg.delta[0] > 0.0 && cfg.delta[0] <= 0.01)) v.fail("delta", "estimate needs delta in (0, 0.01]");
    }

    if (auto t = v.count(j, "trials", 1)) cfg.trials = *t;
    else if (!j.contains("trials")) v.fail("trials", "required positive integer");
    if (auto s = v.count(j, "base_seed", 0)) cfg.base_seed = *s;
    if (auto o = v.count(j, "oracle", 100000)) cfg.oracle = *o;
    if (auto q = v.count(j, "n_quad", 1000)) cfg.n_quad = *q;
    if (auto n = v.count(j, "n_mc", 1)) cfg.n_mc = *n;
    if (auto t = v.count(j, "threads", 0)) cfg.threads = *t;
    if (auto d = v.count(j, "dimension", 2)) cfg.dimension = *d;
    if (j.contains("budget")) {
        if (!j["budget"].is_number() || !(j["budget"].get<double>() > 0.0)) v.fail("budget", "must be a positive number");
        else cfg.budget = j["budget"].get<double>();
    }

    if (!j.contains("output") || !j["output"].is_string() || j["output"].get<std::string>().empty())
        v.fail("output", "required non-empty path prefix");
    else
        cfg.output = j["output"].get<std::string>();

    if (ex == "counterexample") {
        if (!j.contains("case") || !j["case"].is_string()) {
            v.fail("case", "required, one of atom|heavy-tail|variance");
        } else {
            cfg.scenario = j["case"].get<std::string>();
            try {
                parse_scenario_case(cfg.scenario);
            } catch (const std::exception&) {
                v.fail("case", "must be one of atom|heavy-tail|variance");
            }
        }
    } else if (j.contains("case")) {
        v.fail("case", "only allowed for counterexample");
    }

    cfg.phi = v.strings(j, "phi");
    if (ex == "estimate") {
        if (cfg.phi.empty()) v.fail("phi", "required (identity|signed-square|relu-square|indicator:<tau>)");
        for (const auto& p: cfg.phi) {
            try {
                parse_phi(p);
            } catch (const std::exception&) {
                v.fail("phi", "unknown phi '" + p + "'");
            }
        }
    }

    if (ex == "check_campaign") {
        auto names = campaign_names();
        if (!j.contains("campaign") || !j["campaign"].is_string()) {
            v.fail("campaign", "required campaign name");
        } else {
            cfg.campaign = j["campaign"].get<std::string>();
            if (std::find(names.begin(), names.end(), cfg.campaign) == names.end())
                v.fail("campaign", "must be one of pert1|cont1|symmetric_difference|psi1");
        }
    }

    if (!v.problems.empty()) throw validation_error(v.problems);
    if (cfg.model && cfg.sets.size() >= 1) {
        for (const auto& s: cfg.sets) {
            if (parse_set_spec(s).kind == "file") {
                try {
                    build_direction_set(s, cfg.model->d, cfg.base_seed);
                } catch (const std::exception& e) {
                    throw validation_error({std::string("set: ") + e.what()});
                }
            }
        }
    }
    return cfg;
}

double projected_work(const experiment_config& cfg) {
    const double T = static_cast<double>(cfg.trials);
    if (cfg.experiment == "check_campaign") return T*static_cast<double>(cfg.n_mc);
    if (cfg.experiment == "counterexample") {
        double m = static_cast<double>(cfg.m.front());
        double d = cfg.dimension ? static_cast<double>(*cfg.dimension) : 1e5;
        return 3.0*T*m*d;
    }
    const double d = static_cast<double>(cfg.model->d);
    double work = 0.0;
    for (const auto& spec: cfg.sets) {
        auto s = parse_set_spec(spec);
        double n = 1.0, nnz = d;
        if (s.kind == "sphere_random") n = static_cast<double>(s.n);
        else if (s.kind == "spiked") n = static_cast<double>(s.d - 1), nnz = 2.0;
        else if (s.kind == "basis_pm") n = 2.0*d;
        else if (s.kind == "file") {
            auto dirs = load_directions(s.path);
            n = static_cast<double>(dirs.size());
            nnz = dirs.is_sparse() ? 2.0 : d;
        }
        double per_dir = nnz + (cfg.experiment == "w1" ? 10.0 : 0.0) + (cfg.experiment == "estimate" ? 20.0 : 0.0);
        for (std::size_t m: cfg.m) work += T*static_cast<double>(m)*(d + n*per_dir);
    }
    return work;
}

experiment_result run_experiment(const experiment_config& cfg, const run_options& opts) {
    double work = projected_work(cfg);
    if (work > cfg.budget && !opts.force) throw budget_error(work, cfg.budget);
    std::size_t threads = resolve_threads(cfg, opts);
    experiment_result res;
    if (is_sup_experiment(cfg.experiment)) res = run_sup(cfg, threads);
    else if (cfg.experiment == "counterexample") res = run_counterexample(cfg, threads);
    else if (cfg.experiment == "estimate") res = run_estimate(cfg, threads);
    else if (cfg.experiment == "w1") res = run_w1(cfg, threads);
    else if (cfg.experiment == "check_campaign") res = run_check(cfg);
    else throw configuration_error("unknown experiment " + cfg.experiment);
    res.meta["projected_work"] = work;
    res.meta["threads"] = threads;
    return res;
}

// ---- lemma campaigns ----

std::vector<std::string> campaign_names() {
    return {"pert1", "cont1", "symmetric_difference", "psi1"};
}

namespace {

std::vector<double> random_unit(splitmix_engine& eng, std::size_t d) {
    boost::random::normal_distribution<double> normal;
    std::vector<double> v(d);
    double s = 0.0;
    while (!(s > 1e-12)) {
        s = 0.0;
        for (double& x: v) {
            x = normal(eng);
            s += x*x;
        }
    }
    s = std::sqrt(s);
    for (double& x: v) x /= s;
    return v;
}

inequality_check cont1_instance(std::uint64_t seed) {
    splitmix_engine eng(seed);
    law1d law;
    switch (eng() % 5) {
    case 0: law = normal_law(1.0); break;
    case 1: law = laplace_law(); break;
    case 2: law = uniform_law(); break;
    case 3: law = pareto_law(2.5); break;
    default: {
        double b = 0.01 + 0.98*eng.open_unit();
        law = two_sparse_projection_law(uniform_law(), std::sqrt(1.0 - b*b), b);
    }
    }
    std::size_t m = 1 + eng() % 2000;
    double delta = 0.001 + 0.248*eng.open_unit();
    auto x = sample_law(law, m, eng());
    if (eng() % 2) {
        double stretch = 0.7 + 0.6*eng.open_unit(), shift = 0.4*(eng.open_unit() - 0.5);
        for (double& v: x) v = stretch*v + shift;
    }
    auto c = check_cont1(ecdf(x), law, delta);
    c.context["law"] = static_cast<double>(law.family);
    return c;
}

inequality_check pert1_instance(std::uint64_t seed) {
    splitmix_engine eng(seed);
    std::size_t d = 2 + eng() % 5;
    std::size_t m = 1 + eng() % 2000;
    auto x = random_unit(eng, d);
    std::vector<double> y = x;
    if (eng() % 8) {
        double eps = 0.5*eng.open_unit();
        auto g = random_unit(eng, d);
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            y[k] = x[k] + eps*g[k];
            s += y[k]*y[k];
        }
        for (double& t: y) t /= std::sqrt(s);
    }
    double r = 0.005 + eng.open_unit();
    auto batch = sample(vector_model::gaussian(d), m, eng());
    return check_pert1(batch, x, y, r);
}

} // namespace

std::vector<inequality_check> run_campaign(const std::string& name, std::size_t count, std::uint64_t seed,
                                           std::size_t n_mc) {
    std::vector<inequality_check> out;
    if (name == "cont1") {
        for (std::size_t i = 0; i < count; ++i) out.push_back(cont1_instance(derive_seed(seed, i)));
    } else if (name == "pert1") {
        for (std::size_t i = 0; i < count; ++i) out.push_back(pert1_instance(derive_seed(seed, i)));
    } else if (name == "symmetric_difference") {
        const double dists[3] = {0.05, 0.1, 0.2};
        const double levels[3] = {0.1, 0.5, 0.9};
        auto model = vector_model::gaussian(3);
        for (std::size_t i = 0; i < count; ++i) {
            double dist = dists[(i/3) % 3], u = levels[i % 3];
            double theta = 2.0*std::asin(dist/2.0);
            std::vector<double> x{1.0, 0.0, 0.0}, y{std::cos(theta), std::sin(theta), 0.0};
            double r = dist*std::log(std::exp(1.0)/dist);
            out.push_back(check_symmetric_difference(model, x, y, u, r, n_mc, derive_seed(seed, i)));
        }
    } else if (name == "psi1") {
        auto grid = uniform_grid(50.0, 0.01);
        std::vector<std::pair<law1d, double>> cases = {{normal_law(1.0), 1.1}, {laplace_law(), 2.0},
                                                       {uniform_law(), 1.0},   {rademacher_law(), 1.0/std::log(2.0)},
                                                       {pareto_law(2.5), 1.0}, {pareto_law(2.5), 2.0}};
        for (std::size_t i = 0; i < std::max<std::size_t>(count, 1) && i < cases.size(); ++i) {
            auto c = check_psi1(cases[i].first, cases[i].second, grid);
            c.name = "psi1:" + cases[i].first.name;
            out.push_back(c);
        }
        (void)seed;
    } else {
        throw configuration_error("unknown campaign '" + name + "'");
    }
    return out;
}

table checks_table(const std::vector<inequality_check>& checks) {
    table t;
    t.columns = {"name", "lhs", "rhs", "holds", "slack", "mc_tolerance", "violating_t", "context"};
    for (const auto& c: checks) {
        std::string ctx;
        for (const auto& [k, v]: c.context) {
            if (!ctx.empty()) ctx += ';';
            ctx += k + "=" + format_double(v);
        }
        t.rows.push_back({c.name, format_double(c.lhs), format_double(c.rhs), c.holds ? "1" : "0",
                          format_double(c.slack), format_double(c.mc_tolerance),
                          c.violating_t ? format_double(*c.violating_t) : "", ctx});
    }
    return t;
}

} // namespace dkw
