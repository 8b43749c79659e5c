#include <catch2/catch_amalgamated.hpp>

#include "elgen/normal_form.hpp"
#include "elgen/unimodular.hpp"
#include "oracles.hpp"

using namespace elgen;

namespace {

UniSeq matrix_seq(int n, std::vector<Matrix> elems) {
    return UniSeq{RingDesc::matrix_over(RingDesc::Z(), n), std::move(elems)};
}

UniSeq mod_seq(const Int& q, std::initializer_list<Int> vals) {
    UniSeq s{RingDesc::Zmod(q), {}};
    for (const Int& v : vals) {
        Matrix m(RingDesc::Zmod(q), 1, 1);
        m.set(0, 0, v);
        s.elements.push_back(m);
    }
    return s;
}

Int seq_gcd_oracle(const UniSeq& s) {
    Int g = s.ring.kind() == RingDesc::Kind::modular ? s.ring.scalar_modulus() : Int(0);
    for (const Matrix& e : s.elements) g = oracle::gcd_loop(g, e.at(0, 0));
    return g;
}

} // namespace

TEST_CASE("is_unimodular over Z and Z/q") {
    CHECK(is_unimodular(UniSeq::over_z({6, 10, 15})));
    CHECK_FALSE(is_unimodular(UniSeq::over_z({2, 4})));
    CHECK(is_unimodular(mod_seq(10, {4, 5})));
    CHECK_FALSE(is_unimodular(mod_seq(10, {4, 6})));
}

TEST_CASE("is_unimodular over M_2(Z) via the snf stack") {
    Matrix a = Matrix::from_rows_z({{2, 0}, {0, 2}});
    Matrix b = Matrix::from_rows_z({{3, 0}, {0, 1}});
    CHECK(is_unimodular(matrix_seq(2, {a, b})));
    CHECK_FALSE(is_unimodular(matrix_seq(2, {a, a})));
    // oracle cross-check on the stacked invariant factors
    auto f = oracle::invariant_factors_minors(vstack({a, b}));
    REQUIRE(f.size() == 2);
    CHECK((f[0] == 1 && f[1] == 1));
}

TEST_CASE("is_unimodular agrees with the gcd oracle on random scalar sequences") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 1000; ++t) {
        UniSeq s{RingDesc::Z(), {}};
        int len = 2 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i) {
            Matrix m(RingDesc::Z(), 1, 1);
            m.set(0, 0, static_cast<long>(rng() % 2000) - 1000);
            s.elements.push_back(m);
        }
        CHECK(is_unimodular(s) == (seq_gcd_oracle(s) == 1));
    }
}

TEST_CASE("bezout identities") {
    auto b = bezout(UniSeq::over_z({21, 10}));
    REQUIRE(b.coefficients.size() == 2);
    CHECK(b.coefficients[0].at(0, 0) == 1);
    CHECK(b.coefficients[1].at(0, 0) == -2);

    auto b2 = bezout(UniSeq::over_z({1, 999}));
    CHECK(b2.coefficients[0].at(0, 0) == 1);
    CHECK(b2.coefficients[1].at(0, 0) == 0);

    SECTION("matrix ring pair has block coefficients") {
        Matrix a1 = Matrix::from_rows_z({{2, 0}, {0, 2}});
        Matrix a2 = Matrix::from_rows_z({{3, 0}, {0, 1}});
        UniSeq s = matrix_seq(2, {a1, a2});
        auto bb = bezout(s);
        Matrix sum = bb.coefficients[0] * a1 + bb.coefficients[1] * a2;
        CHECK(sum.is_identity());
    }

    SECTION("exact identity on random unimodular tuples") {
        std::mt19937_64 rng(22);
        int done = 0;
        while (done < 200) {
            UniSeq s{RingDesc::Z(), {}};
            int len = 2 + static_cast<int>(rng() % 3);
            for (int i = 0; i < len; ++i) {
                Matrix m(RingDesc::Z(), 1, 1);
                m.set(0, 0, static_cast<long>(rng() % 2000000) - 1000000);
                s.elements.push_back(m);
            }
            if (!is_unimodular(s)) continue;
            ++done;
            auto bz = bezout(s);
            Int sum = 0;
            for (std::size_t i = 0; i < s.elements.size(); ++i)
                sum += bz.coefficients[i].at(0, 0) * s.elements[i].at(0, 0);
            CHECK(sum == 1);
        }
    }

    SECTION("modular bezout") {
        auto bm = bezout(mod_seq(12, {8, 3}));
        Int sum = bm.coefficients[0].at(0, 0) * 8 + bm.coefficients[1].at(0, 0) * 3;
        CHECK(mod_floor(sum, 12) == 1);
    }

    CHECK_THROWS_AS(bezout(UniSeq::over_z({2, 4})), Error);
}

TEST_CASE("reduce_unimodular worked example") {
    auto r = reduce_unimodular(UniSeq::over_z({6, 10, 15}));
    REQUIRE(r.coefficients.size() == 2);
    CHECK(r.coefficients[0].at(0, 0) == 1);
    CHECK(r.coefficients[1].at(0, 0) == 0);
    CHECK(r.reduced.elements[0].at(0, 0) == 21);
    CHECK(r.reduced.elements[1].at(0, 0) == 10);
    CHECK(is_unimodular(r.reduced));
}

TEST_CASE("reduce_unimodular with a unit leading entry keeps zero coefficients") {
    auto r = reduce_unimodular(UniSeq::over_z({1, 7, 9}));
    CHECK(r.coefficients[0].at(0, 0) == 0);
    CHECK(r.coefficients[1].at(0, 0) == 0);
    auto r2 = reduce_unimodular(UniSeq::over_z({-1, 5, 25}));
    CHECK(r2.coefficients[0].at(0, 0) == 0);
}

TEST_CASE("reduce_unimodular errors") {
    CHECK_THROWS_AS(reduce_unimodular(UniSeq::over_z({2, 4, 8})), Error);
    CHECK_THROWS_AS(reduce_unimodular(UniSeq::over_z({3, 5})), Error); // length = sr
}

TEST_CASE("reduce_unimodular property run over Z") {
    std::mt19937_64 rng(33);
    int done = 0;
    while (done < 1000) {
        int len = 3 + static_cast<int>(rng() % 2);
        UniSeq s{RingDesc::Z(), {}};
        for (int i = 0; i < len; ++i) {
            Matrix m(RingDesc::Z(), 1, 1);
            m.set(0, 0, static_cast<long>(rng() % 2000000) - 1000000);
            s.elements.push_back(m);
        }
        if (!is_unimodular(s)) continue;
        ++done;
        auto r = reduce_unimodular(s);
        REQUIRE(r.reduced.elements.size() == s.elements.size() - 1);
        CHECK(is_unimodular(r.reduced));
        const Matrix& last = s.elements.back();
        for (std::size_t i = 0; i + 1 < s.elements.size(); ++i) {
            Matrix expect = s.elements[i] + r.coefficients[i] * last;
            CHECK(r.reduced.elements[i] == expect);
        }
    }
}

TEST_CASE("reduce_unimodular is deterministic") {
    auto a = reduce_unimodular(UniSeq::over_z({6, 10, 15}));
    auto b = reduce_unimodular(UniSeq::over_z({6, 10, 15}));
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
        CHECK(a.coefficients[i] == b.coefficients[i]);
}

TEST_CASE("reduce_unimodular over Z/q needs only length 2") {
    auto r = reduce_unimodular(mod_seq(12, {8, 3}));
    REQUIRE(r.reduced.elements.size() == 1);
    CHECK(oracle::gcd_loop(r.reduced.elements[0].at(0, 0), 12) == 1);
}

TEST_CASE("reduce_unimodular over M_2(Z) from random GL_6 columns") {
    int done = 0;
    for (std::uint64_t s = 0; done < 25; ++s) {
        Matrix g = oracle::random_word_matrix(6, 18, 5000 + s);
        // first block column of a GL_6 element, cut into three 2x2 blocks
        std::vector<Matrix> blocks;
        for (int b = 0; b < 3; ++b) blocks.push_back(g.submatrix(2 * b, 0, 2, 2));
        UniSeq seq = matrix_seq(2, blocks);
        if (!is_unimodular(seq)) continue; // should not happen for a GL column
        ++done;
        auto r = reduce_unimodular(seq);
        REQUIRE(r.reduced.elements.size() == 2);
        CHECK(is_unimodular(r.reduced));
        Matrix expect = blocks[0] + r.coefficients[0] * blocks[2];
        CHECK(r.reduced.elements[0] == expect);
    }
}

TEST_CASE("reduce_unimodular on a length-2 matrix pair (stable range 1)") {
    // needs a genuinely quadratic coefficient: no diagonal T works for (2I, 5I)
    Matrix a = Matrix::identity(RingDesc::Z(), 2).scaled(2);
    Matrix b = Matrix::identity(RingDesc::Z(), 2).scaled(5);
    UniSeq s = matrix_seq(2, {a, b});
    REQUIRE(is_unimodular(s));
    auto r = reduce_unimodular(s);
    REQUIRE(r.reduced.elements.size() == 1);
    CHECK(abs(r.reduced.elements[0].det()) == 1);
    CHECK(r.reduced.elements[0] == a + r.coefficients[0] * b);
}

TEST_CASE("complete_block_pivot escapes the diagonal trap") {
    Matrix b = Matrix::from_rows_z({{1, 0}, {0, 1}, {3, 5}});
    Matrix d = Matrix::from_rows_z({{2, 0}, {0, 2}});
    Matrix c = complete_block_pivot(b, d);
    CHECK(abs((d + c * b).det()) == 1);
}

TEST_CASE("complete_block_pivot scalar case solvability") {
    // 3 + 2Z reaches 1
    Matrix c = complete_block_pivot(Matrix::from_rows_z({{4}, {6}}), Matrix::from_rows_z({{3}}));
    CHECK(abs(3 + c.at(0, 0) * 4 + c.at(0, 1) * 6) == 1);
    // 2 + 5Z contains no unit even though gcd(5, 10, 2) = 1
    CHECK_THROWS_AS(
        complete_block_pivot(Matrix::from_rows_z({{5}, {10}}), Matrix::from_rows_z({{2}})), Error);
}

TEST_CASE("complete_block_pivot") {
    SECTION("already invertible target returns zero") {
        Matrix b = Matrix::from_rows_z({{4, 7}, {2, 9}});
        Matrix d = Matrix::from_rows_z({{0, 1}, {1, 1}});
        Matrix c = complete_block_pivot(b, d);
        CHECK(c.is_zero());
    }
    SECTION("column case via extended gcd") {
        Matrix b = Matrix::from_rows_z({{5}, {7}});
        Matrix d = Matrix::from_rows_z({{0}});
        Matrix c = complete_block_pivot(b, d);
        Int v = d.at(0, 0) + c.at(0, 0) * 5 + c.at(0, 1) * 7;
        CHECK(abs(v) == 1);
    }
    SECTION("random column blocks from GL_6 words") {
        int done = 0;
        for (std::uint64_t s = 0; done < 100; ++s) {
            Matrix g = oracle::random_word_matrix(6, 16, 9000 + s);
            Matrix B = g.submatrix(0, 4, 4, 2), D = g.submatrix(4, 4, 2, 2);
            ++done;
            Matrix c = complete_block_pivot(B, D);
            CHECK(abs((D + c * B).det()) == 1);
        }
    }
    SECTION("determinism") {
        Matrix b = Matrix::from_rows_z({{1, 0}, {0, 1}, {3, 5}});
        Matrix d = Matrix::from_rows_z({{2, 0}, {0, 2}});
        Matrix c = complete_block_pivot(b, d);
        CHECK(abs((d + c * b).det()) == 1);
        CHECK(c == complete_block_pivot(b, d));
    }
    SECTION("rejects genuinely non-unimodular stacks") {
        Matrix b = Matrix::from_rows_z({{2, 0}, {0, 2}, {4, 2}});
        Matrix d = Matrix::from_rows_z({{2, 2}, {0, 2}});
        CHECK_THROWS_AS(complete_block_pivot(b, d), Error);
    }
}
