#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lshfed/errors.hpp"

namespace lshfed {

/// Dense row-major matrix of doubles.
class matrix {
public:
    matrix() = default;
    matrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Entries drawn i.i.d. standard normal from the counter stream `seed`;
/// deterministic and order-independent.
matrix seeded_normal_matrix(int rows, int cols, uint64_t seed);

bool all_finite(const matrix& m);

struct matrix_shape {
    int rows = 0;
    int cols = 0;
    bool operator==(const matrix_shape&) const = default;
};

/// Geometry of a model: ordered list of per-layer matrix shapes.
using model_shape = std::vector<matrix_shape>;

std::size_t total_params(const model_shape& shape);

/// Ordered per-layer gradient (or parameter-delta) matrices for a registered
/// model shape.
struct gradient_update {
    std::string shape_id;
    std::vector<matrix> matrices;

    model_shape shape() const;
    std::size_t total_entries() const;
};

bool all_finite(const gradient_update& g);

/// Throws shape_mismatch unless both updates share layer geometry.
void require_same_shape(const gradient_update& a, const gradient_update& b);

gradient_update add(const gradient_update& a, const gradient_update& b);
gradient_update sub(const gradient_update& a, const gradient_update& b);
gradient_update scaled(const gradient_update& a, double factor);

/// Euclidean (L2) distance over all entries of both updates.
double euclidean_distance(const gradient_update& a, const gradient_update& b);

/// Maps shape ids to layer geometry. Hyperplane generation and wire
/// serialization refuse ids that were never registered.
class shape_registry {
public:
    void register_shape(const std::string& id, model_shape shape);
    const model_shape& lookup(const std::string& id) const; // throws unknown_shape
    bool contains(const std::string& id) const;

private:
    std::map<std::string, model_shape> shapes_;
};

/// Zero-filled update matching a registered shape.
gradient_update zero_update(const shape_registry& reg, const std::string& shape_id);

/// Update with i.i.d. N(0, std^2) entries, counter-seeded.
gradient_update random_update(const shape_registry& reg, const std::string& shape_id,
                              double stddev, uint64_t seed);

} // namespace lshfed
