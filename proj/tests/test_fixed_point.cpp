#include <doctest.h>

#include <cmath>

#include "lshfed/fixed_point.hpp"

using namespace lshfed;

namespace {

constexpr uint64_t kScale = 1ull << 16;
constexpr uint64_t kModulus = 1ull << 32;

shape_registry tiny_registry() {
    shape_registry reg;
    reg.register_shape("tiny", {{1, 4}});
    return reg;
}

fixed_gradient encode_values(const shape_registry& reg, std::initializer_list<double> values) {
    gradient_update g = zero_update(reg, "tiny");
    int i = 0;
    for (double v : values)
        g.matrices[0].data()[i++] = v;
    return encode_fixed(g, kScale, kModulus);
}

} // namespace

TEST_CASE("mod_add and mod_sub match hand-computed residues") {
    // Hand-computed in Z_97: (10 - 30) mod 97 = 77, (96 + 5) mod 97 = 4.
    CHECK(mod_sub(10, 30, 97) == 77);
    CHECK(mod_add(96, 5, 97) == 4);
    CHECK(mod_add(0, 0, 97) == 0);
    CHECK(mod_sub(0, 96, 97) == 1);
    // No intermediate overflow near 2^64.
    const uint64_t big = ~0ull - 1; // modulus 2^64 - 1
    CHECK(mod_add(big - 1, big - 1, big) == big - 2);
    CHECK(mod_sub(0, big - 1, big) == 1);
}

TEST_CASE("encode maps reals to residues with the documented convention") {
    const auto reg = tiny_registry();
    const fixed_gradient f = encode_values(reg, {-1.0, 0.5, -0.25, 0.0});
    // round(-1.0 * 2^16) mod 2^32 = 2^32 - 2^16 = 4294901760 (hand-computed).
    CHECK(f.matrices[0].data[0] == 4294901760ull);
    CHECK(f.matrices[0].data[1] == 32768ull);       // 0.5 * 2^16
    CHECK(f.matrices[0].data[2] == 4294950912ull);  // 2^32 - 0.25 * 2^16
    CHECK(f.matrices[0].data[3] == 0ull);
}

TEST_CASE("decode inverts encode within quantization error") {
    const auto reg = tiny_registry();
    const double values[] = {-1.0, 0.5, -0.25, 1.0 / 3.0};
    gradient_update g = zero_update(reg, "tiny");
    for (int i = 0; i < 4; ++i)
        g.matrices[0].data()[i] = values[i];
    const gradient_update back = decode_fixed(encode_fixed(g, kScale, kModulus));
    for (int i = 0; i < 4; ++i) // |x - round(x * s)/s| <= 1/(2s)
        CHECK(std::abs(back.matrices[0].data()[i] - values[i]) <= 0.5 / kScale);
}

TEST_CASE("encode rejects values outside the representable range") {
    const auto reg = tiny_registry();
    // Magnitude bound: |e| * scale must stay below modulus / 2 = 2^31, so the
    // largest encodable magnitude is just under 2^15 = 32768.
    CHECK_NOTHROW(encode_values(reg, {32767.0, 0, 0, 0}));
    CHECK_THROWS_AS(encode_values(reg, {32768.0, 0, 0, 0}), overflow_error);
    CHECK_THROWS_AS(encode_values(reg, {-32768.0, 0, 0, 0}), overflow_error);
    CHECK_THROWS_AS(encode_values(reg, {std::nan(""), 0, 0, 0}), shape_mismatch);
}

TEST_CASE("add_mod and sub_mod are inverse elementwise operations") {
    const auto reg = tiny_registry();
    const fixed_gradient a = encode_values(reg, {-1.0, 0.5, 2.0, -3.5});
    const fixed_gradient b = encode_values(reg, {0.25, -0.125, 1.0, 7.0});
    const fixed_gradient s = add_mod(a, b);
    const fixed_gradient back = sub_mod(s, b);
    CHECK(back.matrices[0].data == a.matrices[0].data);
    // Addition of residues is encoding of the sum (no overflow here).
    const fixed_gradient direct = encode_values(reg, {-0.75, 0.375, 3.0, 3.5});
    CHECK(s.matrices[0].data == direct.matrices[0].data);
}

TEST_CASE("mixed scale or modulus is rejected") {
    const auto reg = tiny_registry();
    const fixed_gradient a = encode_values(reg, {1, 0, 0, 0});
    gradient_update g = zero_update(reg, "tiny");
    const fixed_gradient other_scale = encode_fixed(g, kScale / 2, kModulus);
    const fixed_gradient other_mod = encode_fixed(g, kScale, kModulus / 2);
    CHECK_THROWS_AS(add_mod(a, other_scale), shape_mismatch);
    CHECK_THROWS_AS(sub_mod(a, other_mod), shape_mismatch);
}

TEST_CASE("constant_fixed fills every entry with the same residue") {
    const auto reg = tiny_registry();
    const fixed_gradient c = constant_fixed(reg, "tiny", kModulus / 2, kScale, kModulus);
    for (uint64_t v : c.matrices[0].data)
        CHECK(v == kModulus / 2);
    CHECK(c.total_entries() == 4);
}

TEST_CASE("uniform_fixed draws residues inside the modulus deterministically") {
    const auto reg = tiny_registry();
    const fixed_gradient u1 = uniform_fixed(reg, "tiny", kScale, kModulus, 9);
    const fixed_gradient u2 = uniform_fixed(reg, "tiny", kScale, kModulus, 9);
    const fixed_gradient u3 = uniform_fixed(reg, "tiny", kScale, kModulus, 10);
    CHECK(u1.matrices[0].data == u2.matrices[0].data);
    CHECK(u1.matrices[0].data != u3.matrices[0].data);
    for (uint64_t v : u1.matrices[0].data)
        CHECK(v < kModulus);
}
