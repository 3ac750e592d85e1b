#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dkw/directions.hpp"
#include "dkw/ecdf.hpp"
#include "dkw/models.hpp"

namespace dkw {

enum class reference_kind { exact, oracle };

// Reference laws for a direction set: one shared law or one per direction.
class reference_laws {
public:
    static reference_laws shared(law1d law);
    static reference_laws per_direction(std::vector<law1d> laws);

    const law1d& for_direction(std::size_t i) const;
    bool is_shared() const { return laws_.size() == 1 && shared_; }
    std::size_t size() const { return laws_.size(); }
    reference_kind kind() const;

private:
    std::vector<law1d> laws_;
    bool shared_ = false;
};

// Exact laws where closed forms exist, oracle ECDFs (n_oracle draws) elsewhere.
reference_laws resolve_reference_laws(const vector_model& model, const direction_set& dirs, std::size_t n_oracle,
                                      std::uint64_t oracle_seed);

struct class_deviation_report {
    double sup_over_class = 0.0;
    std::size_t argmax_direction = 0;
    std::optional<std::vector<deviation_report>> per_direction;
};

// out = projection of the sample onto direction i.
void project_into(const column_source& sample, const direction_set& dirs, std::size_t i, std::span<double> out);

// All projections, one sequence per direction.
std::vector<std::vector<double>> project(const column_source& sample, const direction_set& dirs);

// sup over directions of the exact KS deviation; projections are streamed.
class_deviation_report class_sup_ks(const column_source& sample, const direction_set& dirs,
                                    const reference_laws& refs, bool keep_per_direction = false);

struct pointwise_class_report {
    double sup_deviation = 0.0;
    std::size_t argmax_direction = 0;
    double empirical = 0.0;
    double reference = 0.0;
};

// sup over directions of |F_{m,x}(t) - F_x(t)| at a fixed t.
pointwise_class_report pointwise_class_deviation(const column_source& sample, const direction_set& dirs,
                                                 const reference_laws& refs, double t);

} // namespace dkw
