#include "dkw/directions.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/random/normal_distribution.hpp>

#include "dkw/errors.hpp"
#include "dkw/rng.hpp"

namespace dkw {

point_cloud point_cloud::dense(std::size_t dimension, std::vector<double> rows) {
    if (dimension == 0) throw domain_error("dimension must be positive");
    if (rows.empty() || rows.size() % dimension != 0) throw domain_error("dense rows do not match the dimension");
    for (double v: rows)
        if (!std::isfinite(v)) throw domain_error("coordinates must be finite");
    point_cloud pc;
    pc.d_ = dimension;
    pc.n_ = rows.size()/dimension;
    pc.rows_ = std::move(rows);
    return pc;
}

point_cloud point_cloud::sparse(std::size_t dimension, std::vector<sparse_direction> records) {
    if (records.empty()) throw domain_error("point set must be non-empty");
    for (const auto& r: records) {
        if (r.axis == 0 || r.axis >= dimension) throw domain_error("sparse axis must lie in 2..d");
        if (!std::isfinite(r.a) || !std::isfinite(r.b)) throw domain_error("coordinates must be finite");
    }
    point_cloud pc;
    pc.d_ = dimension;
    pc.n_ = records.size();
    pc.sparse_ = true;
    pc.records_ = std::move(records);
    return pc;
}

std::span<const double> point_cloud::row(std::size_t i) const {
    if (sparse_) throw domain_error("row access on sparse storage");
    if (i >= n_) throw domain_error("index out of range");
    return std::span<const double>(rows_).subspan(i*d_, d_);
}

std::vector<double> point_cloud::densify(std::size_t i) const {
    if (i >= n_) throw domain_error("index out of range");
    if (!sparse_) {
        auto r = row(i);
        return {r.begin(), r.end()};
    }
    std::vector<double> v(d_, 0.0);
    v[0] = records_[i].a;
    v[records_[i].axis] = records_[i].b;
    return v;
}

double point_cloud::distance(std::size_t i, std::size_t j) const {
    if (sparse_) {
        const auto& p = records_[i];
        const auto& q = records_[j];
        double da = p.a - q.a;
        if (p.axis == q.axis) {
            double db = p.b - q.b;
            return std::sqrt(da*da + db*db);
        }
        return std::sqrt(da*da + p.b*p.b + q.b*q.b);
    }
    const double* x = &rows_[i*d_];
    const double* y = &rows_[j*d_];
    double s = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
        double t = x[k] - y[k];
        s += t*t;
    }
    return std::sqrt(s);
}

void point_cloud::distances_from(std::size_t i, std::span<double> out) const {
    for (std::size_t k = 0; k < n_; ++k) out[k] = distance(i, k);
}

point_cloud point_cloud::scaled(double c) const {
    point_cloud pc = *this;
    for (double& v: pc.rows_) v *= c;
    for (auto& r: pc.records_) {
        r.a *= c;
        r.b *= c;
    }
    return pc;
}

point_cloud point_cloud::translated(std::span<const double> shift) const {
    if (shift.size() != d_) throw domain_error("shift dimension mismatch");
    std::vector<double> rows;
    rows.reserve(n_*d_);
    for (std::size_t i = 0; i < n_; ++i) {
        auto v = densify(i);
        for (std::size_t k = 0; k < d_; ++k) rows.push_back(v[k] + shift[k]);
    }
    return dense(d_, std::move(rows));
}

point_cloud point_cloud::subset(std::span<const std::size_t> indices) const {
    if (indices.empty()) throw domain_error("subset must be non-empty");
    if (sparse_) {
        std::vector<sparse_direction> recs;
        for (auto i: indices) recs.push_back(records_.at(i));
        return sparse(d_, std::move(recs));
    }
    std::vector<double> rows;
    for (auto i: indices) {
        auto r = row(i);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return dense(d_, std::move(rows));
}

direction_set::direction_set(point_cloud points): points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double s = 0.0;
        if (points_.is_sparse()) {
            const auto& r = points_.record(i);
            s = r.a*r.a + r.b*r.b;
        } else {
            for (double v: points_.row(i)) s += v*v;
        }
        if (!(std::abs(s - 1.0) <= 1e-9)) throw domain_error("directions must have unit norm");
    }
}

direction_set direction_set::dense(std::size_t dimension, std::vector<double> rows) {
    return direction_set(point_cloud::dense(dimension, std::move(rows)));
}

direction_set direction_set::sparse(std::size_t dimension, std::vector<sparse_direction> records) {
    return direction_set(point_cloud::sparse(dimension, std::move(records)));
}

direction_set direction_set::densified() const {
    std::vector<double> rows;
    rows.reserve(size()*dimension());
    for (std::size_t i = 0; i < size(); ++i) {
        auto v = densify(i);
        rows.insert(rows.end(), v.begin(), v.end());
    }
    return dense(dimension(), std::move(rows));
}

direction_set direction_set::subset(std::span<const std::size_t> indices) const {
    return direction_set(points_.subset(indices));
}

direction_set axis_direction(std::size_t d, std::size_t axis) {
    if (axis >= d) throw domain_error("axis out of range");
    std::vector<double> row(d, 0.0);
    row[axis] = 1.0;
    return direction_set::dense(d, std::move(row));
}

direction_set basis_pm(std::size_t d) {
    std::vector<double> rows(2*d*d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        rows[(2*k)*d + k] = 1.0;
        rows[(2*k + 1)*d + k] = -1.0;
    }
    return direction_set::dense(d, std::move(rows));
}

direction_set random_sphere_directions(std::size_t d, std::size_t n, std::uint64_t seed) {
    if (d == 0 || n == 0) throw domain_error("sphere directions need d >= 1 and n >= 1");
    splitmix_engine eng(derive_seed(seed, 0x5eedull));
    boost::random::normal_distribution<double> normal;
    std::vector<double> rows(n*d);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        do {
            s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                rows[i*d + k] = normal(eng);
                s += rows[i*d + k]*rows[i*d + k];
            }
        } while (s < 1e-300);
        s = std::sqrt(s);
        for (std::size_t k = 0; k < d; ++k) rows[i*d + k] /= s;
    }
    return direction_set::dense(d, std::move(rows));
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_directions(std::ostream& os, const direction_set& dirs) {
    os << "# dimension " << dirs.dimension() << '\n';
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (dirs.is_sparse()) {
            const auto& r = dirs.record(i);
            os << "sparse " << r.axis + 1 << ' ' << g17(r.a) << ' ' << g17(r.b) << '\n';
        } else {
            os << "dense";
            for (double v: dirs.row(i)) os << ' ' << g17(v);
            os << '\n';
        }
    }
}

direction_set read_directions(std::istream& is) {
    std::size_t dim = 0;
    std::vector<std::vector<double>> dense_rows;
    std::vector<sparse_direction> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag[0] == '#') {
            std::string key;
            if (ls >> key && key == "dimension") ls >> dim;
            continue;
        }
        if (tag == "dense") {
            std::vector<double> row;
            double v;
            while (ls >> v) row.push_back(v);
            if (row.empty()) throw domain_error("empty dense row at line " + std::to_string(lineno));
            dense_rows.push_back(std::move(row));
        } else if (tag == "sparse") {
            std::size_t k;
            double a, b;
            if (!(ls >> k >> a >> b) || k < 2) throw domain_error("bad sparse record at line " + std::to_string(lineno));
            records.push_back({k - 1, a, b});
        } else {
            throw domain_error("unknown record '" + tag + "' at line " + std::to_string(lineno));
        }
    }
    if (!dense_rows.empty() && !records.empty()) throw domain_error("mixed dense and sparse records");
    if (!records.empty()) {
        std::size_t need = 0;
        for (const auto& r: records) need = std::max(need, r.axis + 1);
        if (dim == 0) dim = need;
        if (dim < need) throw domain_error("sparse axis exceeds declared dimension");
        return direction_set::sparse(dim, std::move(records));
    }
    if (dense_rows.empty()) throw domain_error("no directions in input");
    std::size_t d = dense_rows.front().size();
    if (dim != 0 && dim != d) throw domain_error("dense rows disagree with declared dimension");
    std::vector<double> flat;
    for (const auto& r: dense_rows) {
        if (r.size() != d) throw domain_error("dense rows have different lengths");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return direction_set::dense(d, std::move(flat));
}

direction_set load_directions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw configuration_error("cannot open direction file " + path);
    return read_directions(in);
}

void save_directions(const std::string& path, const direction_set& dirs) {
    std::ofstream out(path);
    if (!out) throw configuration_error("cannot write direction file " + path);
    write_directions(out, dirs);
}

} // namespace dkw
