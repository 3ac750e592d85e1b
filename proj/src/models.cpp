#include "dkw/models.hpp"

#include <cmath>
#include <memory>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "dkw/ecdf.hpp"
#include "dkw/errors.hpp"
#include "dkw/rng.hpp"

namespace dkw {

vector_model vector_model::gaussian(std::size_t d) {
    if (d == 0) throw domain_error("dimension must be positive");
    return {model_kind::gaussian, d, std::nullopt};
}

vector_model vector_model::product(law1d coord, std::size_t d) {
    if (d == 0) throw domain_error("dimension must be positive");
    if (coord.is_oracle()) throw configuration_error("product models need an exact coordinate law");
    return {model_kind::product, d, std::move(coord)};
}

vector_model vector_model::uniform_cube(std::size_t d) {
    if (d == 0) throw domain_error("dimension must be positive");
    return {model_kind::uniform_cube, d, std::nullopt};
}

law1d vector_model::coordinate_law() const {
    switch (kind) {
    case model_kind::gaussian: return normal_law(1.0);
    case model_kind::uniform_cube: return uniform_law();
    case model_kind::product:
        if (!coordinate) throw configuration_error("product model without coordinate law");
        return *coordinate;
    }
    throw configuration_error("unsupported model kind");
}

std::string vector_model::describe() const {
    switch (kind) {
    case model_kind::gaussian: return "gaussian";
    case model_kind::uniform_cube: return "uniform_cube";
    case model_kind::product: return "product:" + (coordinate ? coordinate->name : std::string("?"));
    }
    return "?";
}

namespace {

const double sqrt3 = std::sqrt(3.0);

void draw(const law1d& law, splitmix_engine& eng, std::span<double> out) {
    switch (law.family) {
    case law_family::gaussian: {
        boost::random::normal_distribution<double> normal(0.0, law.scale);
        for (double& x: out) x = normal(eng);
        return;
    }
    case law_family::uniform:
        for (double& x: out) x = sqrt3*(2.0*eng.open_unit() - 1.0);
        return;
    case law_family::laplace: {
        boost::random::exponential_distribution<double> expo(std::sqrt(2.0));
        for (double& x: out) {
            std::uint64_t bits = eng();
            double e = expo(eng);
            x = (bits & 1u) ? e : -e;
        }
        return;
    }
    default:
        if (law.atoms.size() == 2 && law.atoms[0].mass == 0.5 && law.atoms[1].mass == 0.5) {
            double lo = law.atoms[0].value, hi = law.atoms[1].value;
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (i % 64 == 0) bits = eng();
                out[i] = (bits & 1u) ? hi : lo;
                bits >>= 1;
            }
            return;
        }
        for (double& x: out) x = law.quantile(eng.open_unit());
        return;
    }
}

} // namespace

void fill_column(const vector_model& model, std::size_t m, std::uint64_t seed, std::size_t j, std::span<double> out) {
    if (j >= model.dimension) throw domain_error("column index out of range");
    if (out.size() != m) throw domain_error("column buffer has wrong length");
    splitmix_engine eng(derive_seed(seed, j));
    switch (model.kind) {
    case model_kind::gaussian: {
        boost::random::normal_distribution<double> normal;
        for (double& x: out) x = normal(eng);
        return;
    }
    case model_kind::uniform_cube:
        for (double& x: out) x = sqrt3*(2.0*eng.open_unit() - 1.0);
        return;
    case model_kind::product:
        if (!model.coordinate) throw configuration_error("product model without coordinate law");
        draw(*model.coordinate, eng, out);
        return;
    }
    throw configuration_error("unsupported model kind");
}

sample_batch::sample_batch(vector_model model, std::size_t m, std::uint64_t seed, std::vector<double> values)
    : model_(std::move(model)), m_(m), seed_(seed), values_(std::move(values)) {
    if (values_.size() != m_*model_.dimension) throw domain_error("sample values have wrong size");
}

std::span<const double> sample_batch::column(std::size_t j) const {
    if (j >= model_.dimension) throw domain_error("column index out of range");
    return std::span<const double>(values_).subspan(j*m_, m_);
}

sample_batch sample(const vector_model& model, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw domain_error("sample size must be positive");
    if (model.dimension == 0) throw domain_error("dimension must be positive");
    if (model.kind == model_kind::product && !model.coordinate)
        throw configuration_error("product model without coordinate law");
    std::vector<double> values(m*model.dimension);
    for (std::size_t j = 0; j < model.dimension; ++j)
        fill_column(model, m, seed, j, std::span<double>(values).subspan(j*m, m));
    return sample_batch(model, m, seed, std::move(values));
}

streamed_sample::streamed_sample(vector_model model, std::size_t m, std::uint64_t seed)
    : model_(std::move(model)), m_(m), seed_(seed), first_(m), scratch_(m) {
    if (m == 0) throw domain_error("sample size must be positive");
    fill_column(model_, m_, seed_, 0, first_);
}

std::span<const double> streamed_sample::column(std::size_t j) const {
    if (j == 0) return first_;
    fill_column(model_, m_, seed_, j, scratch_);
    return scratch_;
}

std::vector<double> sample_law(const law1d& law, std::size_t n, std::uint64_t seed) {
    if (law.is_oracle()) throw configuration_error("cannot sample an oracle law");
    std::vector<double> out(n);
    splitmix_engine eng(derive_seed(seed, 0));
    draw(law, eng, out);
    return out;
}

law1d oracle_projection_law(const vector_model& model, std::span<const double> direction, std::size_t n_oracle,
                            std::uint64_t seed) {
    if (direction.size() != model.dimension) throw domain_error("direction dimension mismatch");
    if (n_oracle == 0) throw domain_error("oracle size must be positive");
    std::vector<double> proj(n_oracle, 0.0), col(n_oracle);
    for (std::size_t j = 0; j < model.dimension; ++j) {
        double v = direction[j];
        if (v == 0.0) continue;
        fill_column(model, n_oracle, seed, j, col);
        for (std::size_t i = 0; i < n_oracle; ++i) proj[i] += v*col[i];
    }
    auto sample = std::make_shared<const ecdf>(std::move(proj));
    law1d law;
    law.name = "oracle";
    law.family = law_family::oracle;
    law.oracle = sample;
    law.resolution = 1.0/static_cast<double>(n_oracle);
    law.cdf = [sample](double t) { return sample->eval(t); };
    law.cdf_left = [sample](double t) { return sample->eval_left(t); };
    law.quantile = [sample](double u) { return sample->quantile(u); };
    double mean = 0.0, second = 0.0;
    for (double x: sample->sorted_values()) {
        mean += x;
        second += x*x;
    }
    mean /= static_cast<double>(n_oracle);
    law.mean = mean;
    law.variance = second/static_cast<double>(n_oracle) - mean*mean;
    return law;
}

std::optional<law1d> exact_projection_law(const vector_model& model, std::span<const double> v) {
    if (v.size() != model.dimension) throw domain_error("direction dimension mismatch");
    if (model.kind == model_kind::gaussian) {
        double s = 0.0;
        for (double x: v) s += x*x;
        if (s == 0.0) return discrete_law({{0.0, 1.0}}, "zero");
        return normal_law(std::sqrt(s));
    }
    std::vector<double> nz;
    for (double x: v)
        if (x != 0.0) nz.push_back(x);
    if (nz.size() > 2) return std::nullopt;
    law1d coord = model.coordinate_law();
    if (nz.empty()) return discrete_law({{0.0, 1.0}}, "zero");
    if (nz.size() == 1) return scaled_law(coord, nz[0]);
    return linear_combination_law(coord, nz[0], nz[1]);
}

} // namespace dkw
