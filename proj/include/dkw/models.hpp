#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dkw/laws.hpp"

namespace dkw {

enum class model_kind { gaussian, product, uniform_cube };

struct vector_model {
    model_kind kind = model_kind::gaussian;
    std::size_t dimension = 1;
    std::optional<law1d> coordinate;  // product models only

    static vector_model gaussian(std::size_t d);
    static vector_model product(law1d coord, std::size_t d);
    static vector_model uniform_cube(std::size_t d);

    // Law of a single coordinate.
    law1d coordinate_law() const;
    std::string describe() const;
};

// Read access to the columns of an m x d sample.
class column_source {
public:
    virtual ~column_source() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t dimension() const = 0;
    // Column j. Column 0 stays valid for the lifetime of the source; other
    // columns may be invalidated by the next call.
    virtual std::span<const double> column(std::size_t j) const = 0;
};

// Column-major m x d sample, fully materialized.
class sample_batch final: public column_source {
public:
    sample_batch(vector_model model, std::size_t m, std::uint64_t seed, std::vector<double> values);

    std::size_t rows() const override { return m_; }
    std::size_t dimension() const override { return model_.dimension; }
    std::span<const double> column(std::size_t j) const override;

    double at(std::size_t i, std::size_t j) const { return values_[j*m_ + i]; }
    const vector_model& model() const { return model_; }
    std::uint64_t seed() const { return seed_; }
    std::span<const double> values() const { return values_; }

private:
    vector_model model_;
    std::size_t m_;
    std::uint64_t seed_;
    std::vector<double> values_;
};

// The same sample as sample(model, m, seed), regenerating columns on demand.
class streamed_sample final: public column_source {
public:
    streamed_sample(vector_model model, std::size_t m, std::uint64_t seed);

    std::size_t rows() const override { return m_; }
    std::size_t dimension() const override { return model_.dimension; }
    std::span<const double> column(std::size_t j) const override;

private:
    vector_model model_;
    std::size_t m_;
    std::uint64_t seed_;
    std::vector<double> first_;
    mutable std::vector<double> scratch_;
};

sample_batch sample(const vector_model& model, std::size_t m, std::uint64_t seed);

// Column j of sample(model, m, seed).
void fill_column(const vector_model& model, std::size_t m, std::uint64_t seed, std::size_t j, std::span<double> out);

// n independent draws from a one-dimensional law.
std::vector<double> sample_law(const law1d& law, std::size_t n, std::uint64_t seed);

// ECDF of n_oracle projections onto direction, flagged as an oracle law.
law1d oracle_projection_law(const vector_model& model, std::span<const double> direction, std::size_t n_oracle,
                            std::uint64_t seed);

// Exact law of <X, v> when a closed form exists (gaussian model, or at most two
// nonzero coordinates for product models).
std::optional<law1d> exact_projection_law(const vector_model& model, std::span<const double> v);

} // namespace dkw
