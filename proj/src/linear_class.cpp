#include "dkw/linear_class.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "dkw/errors.hpp"
#include "dkw/rng.hpp"

namespace dkw {

reference_laws reference_laws::shared(law1d law) {
    reference_laws r;
    r.laws_.push_back(std::move(law));
    r.shared_ = true;
    return r;
}

reference_laws reference_laws::per_direction(std::vector<law1d> laws) {
    reference_laws r;
    r.laws_ = std::move(laws);
    return r;
}

const law1d& reference_laws::for_direction(std::size_t i) const {
    if (shared_) return laws_.front();
    if (i >= laws_.size()) throw configuration_error("missing reference law for direction " + std::to_string(i));
    return laws_[i];
}

reference_kind reference_laws::kind() const {
    for (const auto& l: laws_)
        if (l.is_oracle()) return reference_kind::oracle;
    return reference_kind::exact;
}

reference_laws resolve_reference_laws(const vector_model& model, const direction_set& dirs, std::size_t n_oracle,
                                      std::uint64_t oracle_seed) {
    if (model.dimension != dirs.dimension()) throw domain_error("model and direction set dimensions differ");
    if (model.kind == model_kind::gaussian) return reference_laws::shared(normal_law(1.0));

    law1d coord = model.coordinate_law();
    std::map<std::pair<double, double>, std::size_t> seen;
    std::vector<law1d> distinct;
    bool any_oracle = false;
    std::vector<law1d> laws;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        std::pair<double, double> key;
        bool two_sparse = true;
        if (dirs.is_sparse()) {
            key = {dirs.record(i).a, dirs.record(i).b};
        } else {
            std::vector<double> nz;
            for (double v: dirs.row(i))
                if (v != 0.0) nz.push_back(v);
            if (nz.size() == 1) key = {nz[0], 0.0};
            else if (nz.size() == 2) key = {nz[0], nz[1]};
            else two_sparse = false;
        }
        if (two_sparse) {
            auto it = seen.find(key);
            if (it == seen.end()) {
                it = seen.emplace(key, distinct.size()).first;
                distinct.push_back(linear_combination_law(coord, key.first, key.second));
            }
            laws.push_back(distinct[it->second]);
        } else {
            any_oracle = true;
            laws.push_back(oracle_projection_law(model, dirs.row(i), n_oracle, derive_seed(oracle_seed, i)));
        }
    }
    if (!any_oracle && distinct.size() == 1) return reference_laws::shared(distinct.front());
    return reference_laws::per_direction(std::move(laws));
}

void project_into(const column_source& sample, const direction_set& dirs, std::size_t i, std::span<double> out) {
    if (sample.dimension() != dirs.dimension()) throw domain_error("sample and direction set dimensions differ");
    const std::size_t m = sample.rows();
    if (out.size() != m) throw domain_error("projection buffer has wrong length");
    if (dirs.is_sparse()) {
        const auto& r = dirs.record(i);
        auto x0 = sample.column(0);
        auto xk = sample.column(r.axis);
        const double a = r.a, b = r.b;
        for (std::size_t k = 0; k < m; ++k) out[k] = a*x0[k] + b*xk[k];
        return;
    }
    auto v = dirs.row(i);
    bool first = true;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] == 0.0) continue;
        auto col = sample.column(j);
        const double c = v[j];
        if (first) {
            for (std::size_t k = 0; k < m; ++k) out[k] = c*col[k];
            first = false;
        } else {
            for (std::size_t k = 0; k < m; ++k) out[k] += c*col[k];
        }
    }
    if (first) std::fill(out.begin(), out.end(), 0.0);
}

std::vector<std::vector<double>> project(const column_source& sample, const direction_set& dirs) {
    std::vector<std::vector<double>> out(dirs.size(), std::vector<double>(sample.rows()));
    for (std::size_t i = 0; i < dirs.size(); ++i) project_into(sample, dirs, i, out[i]);
    return out;
}

namespace {

void check_refs(const direction_set& dirs, const reference_laws& refs) {
    if (refs.size() == 0) throw configuration_error("missing reference law");
    if (!refs.is_shared() && refs.size() != dirs.size())
        throw configuration_error("reference laws do not match the number of directions");
}

} // namespace

class_deviation_report class_sup_ks(const column_source& sample, const direction_set& dirs,
                                    const reference_laws& refs, bool keep_per_direction) {
    check_refs(dirs, refs);
    std::vector<double> y(sample.rows());
    ks_workspace ws;
    class_deviation_report rep;
    rep.sup_over_class = -1.0;
    if (keep_per_direction) rep.per_direction.emplace();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        project_into(sample, dirs, i, y);
        auto d = ks_sup_deviation_unsorted(y, refs.for_direction(i), ws);
        if (d.sup_deviation > rep.sup_over_class) {
            rep.sup_over_class = d.sup_deviation;
            rep.argmax_direction = i;
        }
        if (keep_per_direction) rep.per_direction->push_back(d);
    }
    return rep;
}

pointwise_class_report pointwise_class_deviation(const column_source& sample, const direction_set& dirs,
                                                 const reference_laws& refs, double t) {
    check_refs(dirs, refs);
    const std::size_t m = sample.rows();
    std::vector<double> y(m);
    const double shared_f = refs.is_shared() ? refs.for_direction(0).cdf(t) : 0.0;
    pointwise_class_report rep;
    rep.sup_deviation = -1.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        project_into(sample, dirs, i, y);
        std::size_t below = 0;
        for (double v: y) below += v <= t;
        double fm = static_cast<double>(below)/static_cast<double>(m);
        double f = refs.is_shared() ? shared_f : refs.for_direction(i).cdf(t);
        double d = std::abs(fm - f);
        if (d > rep.sup_deviation) {
            rep = {d, i, fm, f};
        }
    }
    return rep;
}

} // namespace dkw
