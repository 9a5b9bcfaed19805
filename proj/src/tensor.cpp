#include "lshfed/tensor.hpp"

#include <cmath>
#include <stdexcept>

#include "lshfed/rng.hpp"

namespace lshfed {

matrix::matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw shape_mismatch("matrix dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

matrix seeded_normal_matrix(int rows, int cols, uint64_t seed) {
    matrix m(rows, cols);
    auto& d = m.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = rng::normal_at(seed, i);
    return m;
}

bool all_finite(const matrix& m) {
    for (double v : m.data())
        if (!std::isfinite(v))
            return false;
    return true;
}

std::size_t total_params(const model_shape& shape) {
    std::size_t n = 0;
    for (const auto& s : shape)
        n += static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
    return n;
}

model_shape gradient_update::shape() const {
    model_shape s;
    s.reserve(matrices.size());
    for (const auto& m : matrices)
        s.push_back({m.rows(), m.cols()});
    return s;
}

std::size_t gradient_update::total_entries() const {
    std::size_t n = 0;
    for (const auto& m : matrices)
        n += m.size();
    return n;
}

bool all_finite(const gradient_update& g) {
    for (const auto& m : g.matrices)
        if (!all_finite(m))
            return false;
    return true;
}

void require_same_shape(const gradient_update& a, const gradient_update& b) {
    if (a.matrices.size() != b.matrices.size())
        throw shape_mismatch("updates hold different matrix counts");
    for (std::size_t i = 0; i < a.matrices.size(); ++i)
        if (!a.matrices[i].same_shape(b.matrices[i]))
            throw shape_mismatch("updates differ in matrix " + std::to_string(i) + " geometry");
}

gradient_update add(const gradient_update& a, const gradient_update& b) {
    require_same_shape(a, b);
    gradient_update out = a;
    for (std::size_t i = 0; i < out.matrices.size(); ++i) {
        auto& dst = out.matrices[i].data();
        const auto& src = b.matrices[i].data();
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] += src[k];
    }
    return out;
}

gradient_update sub(const gradient_update& a, const gradient_update& b) {
    require_same_shape(a, b);
    gradient_update out = a;
    for (std::size_t i = 0; i < out.matrices.size(); ++i) {
        auto& dst = out.matrices[i].data();
        const auto& src = b.matrices[i].data();
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] -= src[k];
    }
    return out;
}

gradient_update scaled(const gradient_update& a, double factor) {
    gradient_update out = a;
    for (auto& m : out.matrices)
        for (auto& v : m.data())
            v *= factor;
    return out;
}

double euclidean_distance(const gradient_update& a, const gradient_update& b) {
    require_same_shape(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.matrices.size(); ++i) {
        const auto& x = a.matrices[i].data();
        const auto& y = b.matrices[i].data();
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double d = x[k] - y[k];
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

void shape_registry::register_shape(const std::string& id, model_shape shape) {
    shapes_[id] = std::move(shape);
}

const model_shape& shape_registry::lookup(const std::string& id) const {
    auto it = shapes_.find(id);
    if (it == shapes_.end())
        throw unknown_shape("shape id not registered: " + id);
    return it->second;
}

bool shape_registry::contains(const std::string& id) const { return shapes_.count(id) > 0; }

gradient_update zero_update(const shape_registry& reg, const std::string& shape_id) {
    const auto& shape = reg.lookup(shape_id);
    gradient_update g;
    g.shape_id = shape_id;
    g.matrices.reserve(shape.size());
    for (const auto& s : shape)
        g.matrices.emplace_back(s.rows, s.cols);
    return g;
}

gradient_update random_update(const shape_registry& reg, const std::string& shape_id,
                              double stddev, uint64_t seed) {
    gradient_update g = zero_update(reg, shape_id);
    for (std::size_t i = 0; i < g.matrices.size(); ++i) {
        auto& m = g.matrices[i];
        const uint64_t sub = rng::derive(seed, i);
        for (std::size_t k = 0; k < m.data().size(); ++k)
            m.data()[k] = stddev * rng::normal_at(sub, k);
    }
    return g;
}

} // namespace lshfed
