#include <doctest.h>

#include <cmath>

#include "lshfed/rng.hpp"
#include "lshfed/tensor.hpp"

using namespace lshfed;

namespace {

shape_registry small_registry() {
    shape_registry reg;
    reg.register_shape("pair", {{2, 3}, {3, 1}});
    return reg;
}

} // namespace

TEST_CASE("matrix storage is row-major") {
    matrix m(2, 3);
    m.at(0, 0) = 1.0;
    m.at(0, 2) = 2.0;
    m.at(1, 0) = 3.0;
    CHECK(m.data()[0] == 1.0);
    CHECK(m.data()[2] == 2.0);
    CHECK(m.data()[3] == 3.0); // row 1 starts at index cols
    CHECK(m.size() == 6);
}

TEST_CASE("seeded_normal_matrix is deterministic and seed-sensitive") {
    const matrix a = seeded_normal_matrix(4, 5, 11);
    const matrix b = seeded_normal_matrix(4, 5, 11);
    const matrix c = seeded_normal_matrix(4, 5, 12);
    CHECK(a.data() == b.data());
    CHECK(a.data() != c.data());
    // Entry t is the t-th normal draw of the stream, independent of geometry.
    CHECK(a.at(0, 0) == rng::normal_at(11, 0));
    CHECK(a.at(1, 0) == rng::normal_at(11, 5)); // row-major position 5
}

TEST_CASE("add, sub and scaled are elementwise") {
    const auto reg = small_registry();
    gradient_update a = random_update(reg, "pair", 1.0, 3);
    gradient_update b = random_update(reg, "pair", 1.0, 4);

    const gradient_update s = add(a, b);
    const gradient_update d = sub(a, b);
    const gradient_update h = scaled(a, 0.5);
    for (std::size_t i = 0; i < a.matrices.size(); ++i)
        for (std::size_t t = 0; t < a.matrices[i].data().size(); ++t) {
            const double av = a.matrices[i].data()[t];
            const double bv = b.matrices[i].data()[t];
            CHECK(s.matrices[i].data()[t] == doctest::Approx(av + bv));
            CHECK(d.matrices[i].data()[t] == doctest::Approx(av - bv));
            CHECK(h.matrices[i].data()[t] == doctest::Approx(0.5 * av));
        }
}

TEST_CASE("euclidean_distance matches a hand-computed case") {
    shape_registry reg;
    reg.register_shape("one", {{1, 2}});
    gradient_update a = zero_update(reg, "one");
    gradient_update b = zero_update(reg, "one");
    a.matrices[0].at(0, 0) = 3.0; // difference (3, 4) has norm 5
    b.matrices[0].at(0, 1) = -4.0;
    CHECK(euclidean_distance(a, b) == doctest::Approx(5.0));
    CHECK(euclidean_distance(a, a) == 0.0);
}

TEST_CASE("shape mismatches are rejected") {
    shape_registry reg;
    reg.register_shape("one", {{1, 2}});
    reg.register_shape("two", {{2, 1}});
    const gradient_update a = zero_update(reg, "one");
    const gradient_update b = zero_update(reg, "two");
    CHECK_THROWS_AS(add(a, b), shape_mismatch);
    CHECK_THROWS_AS(sub(a, b), shape_mismatch);
    CHECK_THROWS_AS(euclidean_distance(a, b), shape_mismatch);
}

TEST_CASE("registry lookup of an unregistered id throws") {
    const auto reg = small_registry();
    CHECK(reg.contains("pair"));
    CHECK(!reg.contains("nope"));
    CHECK_THROWS_AS(reg.lookup("nope"), unknown_shape);
    CHECK_THROWS_AS(zero_update(reg, "nope"), unknown_shape);
}

TEST_CASE("zero_update and total counts") {
    const auto reg = small_registry();
    const gradient_update z = zero_update(reg, "pair");
    CHECK(z.total_entries() == 2 * 3 + 3 * 1);
    CHECK(total_params(z.shape()) == 9);
    for (const auto& m : z.matrices)
        for (double v : m.data())
            CHECK(v == 0.0);
}

TEST_CASE("random_update stddev scales the draws") {
    const auto reg = small_registry();
    const gradient_update u = random_update(reg, "pair", 1.0, 5);
    const gradient_update v = random_update(reg, "pair", 2.5, 5);
    for (std::size_t i = 0; i < u.matrices.size(); ++i)
        for (std::size_t t = 0; t < u.matrices[i].data().size(); ++t)
            CHECK(v.matrices[i].data()[t] ==
                  doctest::Approx(2.5 * u.matrices[i].data()[t]));
}

TEST_CASE("all_finite flags NaN and infinity") {
    const auto reg = small_registry();
    gradient_update u = zero_update(reg, "pair");
    CHECK(all_finite(u));
    u.matrices[1].at(2, 0) = std::nan("");
    CHECK(!all_finite(u));
    u.matrices[1].at(2, 0) = INFINITY;
    CHECK(!all_finite(u));
}
