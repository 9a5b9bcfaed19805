#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lshfed/tensor.hpp"

namespace lshfed {

/// One matrix of fixed-point residues in [0, modulus).
struct fixed_matrix {
    int rows = 0;
    int cols = 0;
    std::vector<uint64_t> data;
};

/// Gradient update encoded into the additive group Z_d with a fixed scale.
/// Entry e maps to round(e * scale) mod d, negatives represented as d - |.|.
struct fixed_gradient {
    std::string shape_id;
    uint64_t scale = 0;
    uint64_t modulus = 0;
    std::vector<fixed_matrix> matrices;

    std::size_t total_entries() const;
};

/// Modular add/sub on single residues; safe for any modulus < 2^64.
constexpr uint64_t mod_add(uint64_t a, uint64_t b, uint64_t d) {
    return a >= d - b ? a - (d - b) : a + b;
}
constexpr uint64_t mod_sub(uint64_t a, uint64_t b, uint64_t d) {
    return a >= b ? a - b : d - (b - a);
}

/// Encode; throws overflow_error if any |entry| * scale >= modulus / 2,
/// shape/finite violations throw shape_mismatch.
fixed_gradient encode_fixed(const gradient_update& g, uint64_t scale, uint64_t modulus);

/// Decode; residues in [d/2, d) map to negative reals.
gradient_update decode_fixed(const fixed_gradient& f);

/// Elementwise modular arithmetic; throws shape_mismatch when geometry,
/// scale or modulus differ.
fixed_gradient add_mod(const fixed_gradient& a, const fixed_gradient& b);
fixed_gradient sub_mod(const fixed_gradient& a, const fixed_gradient& b);

/// All-entries-equal gradient in fixed-point form (used for the public mask
/// target R_sum).
fixed_gradient constant_fixed(const shape_registry& reg, const std::string& shape_id,
                              uint64_t value, uint64_t scale, uint64_t modulus);

/// Uniform residues in [0, modulus), counter-seeded.
fixed_gradient uniform_fixed(const shape_registry& reg, const std::string& shape_id,
                             uint64_t scale, uint64_t modulus, uint64_t seed);

} // namespace lshfed
