#include "lshfed/fixed_point.hpp"

#include <cmath>
#include <string>

#include "lshfed/rng.hpp"

namespace lshfed {

std::size_t fixed_gradient::total_entries() const {
    std::size_t n = 0;
    for (const auto& m : matrices)
        n += m.data.size();
    return n;
}

namespace {

void require_compatible(const fixed_gradient& a, const fixed_gradient& b) {
    if (a.scale != b.scale || a.modulus != b.modulus)
        throw shape_mismatch("fixed-point operands use different scale or modulus");
    if (a.matrices.size() != b.matrices.size())
        throw shape_mismatch("fixed-point operands hold different matrix counts");
    for (std::size_t i = 0; i < a.matrices.size(); ++i)
        if (a.matrices[i].rows != b.matrices[i].rows || a.matrices[i].cols != b.matrices[i].cols)
            throw shape_mismatch("fixed-point operands differ in matrix " + std::to_string(i) +
                                 " geometry");
}

fixed_gradient skeleton(const shape_registry& reg, const std::string& shape_id, uint64_t scale,
                        uint64_t modulus) {
    const auto& shape = reg.lookup(shape_id);
    fixed_gradient f;
    f.shape_id = shape_id;
    f.scale = scale;
    f.modulus = modulus;
    f.matrices.reserve(shape.size());
    for (const auto& s : shape) {
        fixed_matrix m;
        m.rows = s.rows;
        m.cols = s.cols;
        m.data.assign(static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols), 0);
        f.matrices.push_back(std::move(m));
    }
    return f;
}

} // namespace

fixed_gradient encode_fixed(const gradient_update& g, uint64_t scale, uint64_t modulus) {
    if (scale == 0 || modulus < 2)
        throw shape_mismatch("fixed-point encoding needs scale >= 1 and modulus >= 2");
    const double limit = static_cast<double>(modulus) / 2.0;
    fixed_gradient f;
    f.shape_id = g.shape_id;
    f.scale = scale;
    f.modulus = modulus;
    f.matrices.reserve(g.matrices.size());
    for (const auto& m : g.matrices) {
        fixed_matrix fm;
        fm.rows = m.rows();
        fm.cols = m.cols();
        fm.data.reserve(m.size());
        for (double v : m.data()) {
            if (!std::isfinite(v))
                throw shape_mismatch("cannot encode non-finite entry");
            const double scaled = std::round(v * static_cast<double>(scale));
            if (std::abs(scaled) >= limit)
                throw overflow_error("entry magnitude exceeds modulus/2 after scaling");
            const auto mag = static_cast<uint64_t>(std::abs(scaled));
            fm.data.push_back(scaled >= 0.0 ? mag : modulus - mag);
        }
        f.matrices.push_back(std::move(fm));
    }
    return f;
}

gradient_update decode_fixed(const fixed_gradient& f) {
    gradient_update g;
    g.shape_id = f.shape_id;
    g.matrices.reserve(f.matrices.size());
    const uint64_t half = f.modulus / 2;
    const double inv_scale = 1.0 / static_cast<double>(f.scale);
    for (const auto& fm : f.matrices) {
        matrix m(fm.rows, fm.cols);
        auto& d = m.data();
        for (std::size_t i = 0; i < fm.data.size(); ++i) {
            const uint64_t e = fm.data[i];
            d[i] = e < half ? static_cast<double>(e) * inv_scale
                            : -static_cast<double>(f.modulus - e) * inv_scale;
        }
        g.matrices.push_back(std::move(m));
    }
    return g;
}

fixed_gradient add_mod(const fixed_gradient& a, const fixed_gradient& b) {
    require_compatible(a, b);
    fixed_gradient out = a;
    for (std::size_t i = 0; i < out.matrices.size(); ++i) {
        auto& dst = out.matrices[i].data;
        const auto& src = b.matrices[i].data;
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] = mod_add(dst[k], src[k], a.modulus);
    }
    return out;
}

fixed_gradient sub_mod(const fixed_gradient& a, const fixed_gradient& b) {
    require_compatible(a, b);
    fixed_gradient out = a;
    for (std::size_t i = 0; i < out.matrices.size(); ++i) {
        auto& dst = out.matrices[i].data;
        const auto& src = b.matrices[i].data;
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] = mod_sub(dst[k], src[k], a.modulus);
    }
    return out;
}

fixed_gradient constant_fixed(const shape_registry& reg, const std::string& shape_id,
                              uint64_t value, uint64_t scale, uint64_t modulus) {
    fixed_gradient f = skeleton(reg, shape_id, scale, modulus);
    const uint64_t v = value % modulus;
    for (auto& m : f.matrices)
        for (auto& e : m.data)
            e = v;
    return f;
}

fixed_gradient uniform_fixed(const shape_registry& reg, const std::string& shape_id,
                             uint64_t scale, uint64_t modulus, uint64_t seed) {
    fixed_gradient f = skeleton(reg, shape_id, scale, modulus);
    std::size_t counter = 0;
    for (auto& m : f.matrices)
        for (auto& e : m.data)
            e = rng::uniform_mod_at(seed, counter++, modulus);
    return f;
}

} // namespace lshfed
