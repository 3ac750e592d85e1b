#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dkw {

// a*e_0 + b*e_axis, axis >= 1 (0-based).
struct sparse_direction {
    std::size_t axis;
    double a;
    double b;
};

// Finite point set in R^d, stored dense (row-major) or as two-support records.
class point_cloud {
public:
    static point_cloud dense(std::size_t dimension, std::vector<double> rows);
    static point_cloud sparse(std::size_t dimension, std::vector<sparse_direction> records);

    std::size_t size() const { return n_; }
    std::size_t dimension() const { return d_; }
    bool is_sparse() const { return sparse_; }

    std::span<const double> row(std::size_t i) const;
    const sparse_direction& record(std::size_t i) const { return records_.at(i); }
    std::vector<double> densify(std::size_t i) const;

    double distance(std::size_t i, std::size_t j) const;
    // out[k] = distance(i, k)
    void distances_from(std::size_t i, std::span<double> out) const;

    point_cloud scaled(double c) const;
    point_cloud translated(std::span<const double> shift) const;  // result is dense
    point_cloud subset(std::span<const std::size_t> indices) const;

private:
    std::size_t d_ = 0;
    std::size_t n_ = 0;
    bool sparse_ = false;
    std::vector<double> rows_;
    std::vector<sparse_direction> records_;
};

// Point cloud whose members are unit vectors.
class direction_set {
public:
    static direction_set dense(std::size_t dimension, std::vector<double> rows);
    static direction_set sparse(std::size_t dimension, std::vector<sparse_direction> records);
    explicit direction_set(point_cloud points);

    std::size_t size() const { return points_.size(); }
    std::size_t dimension() const { return points_.dimension(); }
    bool is_sparse() const { return points_.is_sparse(); }
    const point_cloud& points() const { return points_; }
    operator const point_cloud&() const { return points_; }

    std::span<const double> row(std::size_t i) const { return points_.row(i); }
    const sparse_direction& record(std::size_t i) const { return points_.record(i); }
    std::vector<double> densify(std::size_t i) const { return points_.densify(i); }
    direction_set densified() const;
    direction_set subset(std::span<const std::size_t> indices) const;
    double distance(std::size_t i, std::size_t j) const { return points_.distance(i, j); }

private:
    point_cloud points_;
};

direction_set axis_direction(std::size_t d, std::size_t axis = 0);
direction_set basis_pm(std::size_t d);
direction_set random_sphere_directions(std::size_t d, std::size_t n, std::uint64_t seed);

// Text format: optional "# dimension d" header, then "dense v1 ... vd" or
// "sparse k a b" (k is the 1-based axis) per line. 17 significant digits.
void write_directions(std::ostream& os, const direction_set& dirs);
direction_set read_directions(std::istream& is);
direction_set load_directions(const std::string& path);
void save_directions(const std::string& path, const direction_set& dirs);

} // namespace dkw
