#include <catch2/catch_amalgamated.hpp>

#include "elgen/matrix.hpp"
#include "elgen/normal_form.hpp"
#include "elgen/ring.hpp"
#include "oracles.hpp"

using namespace elgen;

namespace {
const RingDesc Z = RingDesc::Z();
}

TEST_CASE("matrix multiplication basics") {
    Matrix m = oracle::random_word_matrix(3, 10, 7);
    CHECK(Matrix::identity(Z, 3) * m == m);

    Matrix a = Matrix::from_rows_z({{0, 1}, {1, 1}});
    Matrix b = Matrix::from_rows_z({{-1, 1}, {1, 0}});
    CHECK((a * b).is_identity());

    CHECK_THROWS_AS(Matrix(Z, 2, 3) * Matrix(Z, 2, 3), Error);
    CHECK_THROWS_AS(Matrix(Z, 2, 2) * Matrix(RingDesc::Zmod(5), 2, 2), Error);
}

TEST_CASE("block view is a ring homomorphism on samples") {
    for (std::uint64_t s = 0; s < 12; ++s) {
        Matrix a = oracle::random_word_matrix(8, 12, 100 + s);
        Matrix b = oracle::random_word_matrix(8, 12, 200 + s);
        Matrix va = a.block_view(2), vb = b.block_view(2);
        CHECK((va * vb).same_entries(a * b));
        CHECK((va + vb).same_entries(a + b));
        CHECK(va.block_join() == a);
    }
    // block elementarity of e_15(3) seen over M_2(Z)
    Matrix e = elem(1, 5, Int(3), 8, Z);
    Matrix v = e.block_view(2);
    int nonzero_blocks = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Matrix blk = v.block(i, j);
            bool diag_id = (i == j) && blk.is_identity();
            if (!diag_id && !blk.is_zero()) ++nonzero_blocks;
        }
    CHECK(nonzero_blocks == 1);

    CHECK(Matrix::identity(Z, 8).block_view(2).block(1, 1).is_identity());
    CHECK_THROWS_AS(Matrix::identity(Z, 9).block_view(2), Error);
}

TEST_CASE("exact inverse") {
    CHECK(Matrix::identity(Z, 4).inverse().is_identity());
    Matrix a = Matrix::from_rows_z({{0, 1}, {1, 1}});
    CHECK(a.inverse() == Matrix::from_rows_z({{-1, 1}, {1, 0}}));
    CHECK_FALSE(Matrix::from_rows_z({{2, 0}, {0, 1}}).try_inverse().has_value());
    CHECK_THROWS_AS(Matrix::from_rows_z({{2, 0}, {0, 1}}).inverse(), Error);

    for (std::uint64_t s = 0; s < 10; ++s) {
        Matrix m = oracle::random_word_matrix(5, 14, 300 + s);
        CHECK((m.inverse() * m).is_identity());
        CHECK((m * m.inverse()).is_identity());
    }
}

TEST_CASE("inverse over Z mod q including composite q") {
    RingDesc zq = RingDesc::Zmod(6);
    Matrix m(zq, 2, 2);
    m.set(0, 0, 5);
    m.set(1, 1, 1);
    m.set(0, 1, 3);
    REQUIRE(m.det() == 5); // unit mod 6
    Matrix inv = m.inverse();
    CHECK((inv * m).is_identity());

    Matrix bad(zq, 2, 2);
    bad.set(0, 0, 2);
    bad.set(1, 1, 1);
    CHECK_FALSE(bad.try_inverse().has_value());
}

TEST_CASE("determinant") {
    CHECK(Matrix::identity(Z, 5).det() == 1);
    CHECK(elem(2, 4, Int(9), 5, Z).det() == 1);
    CHECK(Matrix::from_rows_z({{0, 1}, {1, 1}}).det() == -1);
    for (std::uint64_t s = 0; s < 8; ++s) {
        Matrix m(Z, 4, 4);
        std::mt19937_64 rng(900 + s);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m.set(i, j, static_cast<int>(rng() % 19) - 9);
        CHECK(m.det() == oracle::det_laplace(m));
    }
    CHECK(is_in_el(oracle::random_word_matrix(4, 10, 42)));
    CHECK_FALSE(is_in_el(Matrix::from_rows_z({{0, 1}, {1, 1}})));
}

TEST_CASE("smith normal form") {
    SECTION("already diagonal") {
        Matrix m = Matrix::from_rows_z({{2, 0}, {0, 4}});
        auto r = snf(m);
        CHECK(r.D == Matrix::from_rows_z({{2, 0}, {0, 4}}));
        CHECK(r.U * m * r.V == r.D);
    }
    SECTION("worked example") {
        Matrix m = Matrix::from_rows_z({{2, 4}, {6, 8}});
        auto r = snf(m);
        auto f = r.invariant_factors();
        REQUIRE(f.size() == 2);
        CHECK(f[0] == 2);
        CHECK(f[1] == 4);
        CHECK(r.U * m * r.V == r.D);
        CHECK(abs(r.U.det()) == 1);
        CHECK(abs(r.V.det()) == 1);
    }
    SECTION("unimodular input") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            Matrix u = oracle::random_word_matrix(2, 8, 400 + s);
            CHECK(snf(u).D.is_identity());
        }
    }
    SECTION("matches the minor-gcd oracle and GL invariance") {
        std::mt19937_64 rng(55);
        for (int trial = 0; trial < 12; ++trial) {
            Matrix m(Z, 3, 4);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 4; ++j) m.set(i, j, static_cast<int>(rng() % 13) - 6);
            auto r = snf(m);
            CHECK(r.U * m * r.V == r.D);
            CHECK(r.invariant_factors() == oracle::invariant_factors_minors(m));

            Matrix g = oracle::random_word_matrix(3, 10, 777 + trial);
            CHECK(snf(g * m).invariant_factors() == r.invariant_factors());
        }
        // divisibility chain
        Matrix m = Matrix::from_rows_z({{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}});
        auto f = snf(m).invariant_factors();
        for (std::size_t i = 0; i + 1 < f.size(); ++i) CHECK(f[i + 1] % f[i] == 0);
    }
}

TEST_CASE("hermite form and left inverse") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 12; ++trial) {
        Matrix m(Z, 5, 3);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 3; ++j) m.set(i, j, static_cast<int>(rng() % 15) - 7);
        auto r = hnf(m);
        CHECK(r.U * m == r.H);
        CHECK(abs(r.U.det()) == 1);
        // staircase: zero below each pivot, pivot positive, reduced above
        int prev = -1;
        for (std::size_t k = 0; k < r.pivot_cols.size(); ++k) {
            int j = r.pivot_cols[k];
            CHECK(j > prev);
            prev = j;
            const Int& p = r.H.at(static_cast<int>(k), j);
            CHECK(p > 0);
            for (int i = static_cast<int>(k) + 1; i < 5; ++i) CHECK(r.H.at(i, j) == 0);
            for (int i = 0; i < static_cast<int>(k); ++i) {
                CHECK(r.H.at(i, j) >= 0);
                CHECK(r.H.at(i, j) < p);
            }
        }
    }
    // left inverse from the transform on a unimodular stack
    Matrix u = oracle::random_word_matrix(6, 20, 4242);
    Matrix stack = u.submatrix(0, 0, 6, 2);
    auto li = left_inverse(stack);
    REQUIRE(li.has_value());
    CHECK((*li * stack).is_identity());
}

TEST_CASE("stable range of matrix rings") {
    CHECK(stable_range_matrix(2, 1) == 2);
    CHECK(stable_range_matrix(2, 2) == 1);
    CHECK(stable_range_matrix(5, 2) == 3);
    for (int n = 2; n <= 6; ++n) CHECK(stable_range_matrix(2, n) == 1);

    CHECK(RingDesc::Z().declared_stable_range() == 2);
    CHECK(RingDesc::Zmod(12).declared_stable_range() == 1);
    CHECK(RingDesc::matrix_over(RingDesc::Z(), 3).declared_stable_range() == 1);
    CHECK(RingDesc::matrix_over(RingDesc::Z(), 1).declared_stable_range() == 2);
}

TEST_CASE("ring descriptor tower") {
    RingDesc m2 = RingDesc::matrix_over(Z, 2);
    CHECK(m2.generator_count() == 2);
    CHECK(m2.str() == "M_2(Z)");
    CHECK_THROWS_AS(RingDesc::matrix_over(m2, 2), Error);
    CHECK(Z.with_scalar_generators({Int(1), Int(2), Int(3)}).generator_count() == 3);
}
