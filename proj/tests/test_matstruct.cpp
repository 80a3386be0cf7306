#include <doctest.h>

#include "hyperlip/matstruct.hpp"

using namespace hyperlip;

namespace {

IntMat mk(std::initializer_list<std::initializer_list<long long>> rows) {
    IntMat m;
    for (const auto& r : rows) {
        IntVec row;
        for (long long x : r) row.push_back(BigInt(x));
        m.push_back(std::move(row));
    }
    return m;
}

// direct power test up to the Wielandt bound; oracle for primitivity
bool primitive_by_powers(const IntMat& a) {
    int n = (int)a.size();
    IntMat p = a;
    long long bound = (long long)(n - 1) * (n - 1) + 1;
    for (long long e = 1; e <= bound; ++e) {
        if (mat_positive(p)) return true;
        p = mat_mul(p, a);
    }
    return false;
}

bool upper_block_triangular(const FrobeniusForm& f) {
    int n = (int)f.permutation.size();
    std::vector<int> block_of(n);
    int b = 0, pos = 0;
    for (const auto& blk : f.blocks) {
        for (std::size_t i = 0; i < blk.size(); ++i) block_of[pos++] = b;
        ++b;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (f.permuted[i][j] > 0 && block_of[i] > block_of[j]) return false;
    return true;
}

} // namespace

TEST_SUITE_BEGIN("matstruct");

TEST_CASE("frobenius_form") {
    SUBCASE("already triangular") {
        FrobeniusForm f = frobenius_form(mk({{1, 1}, {0, 3}}));
        CHECK(f.permutation == std::vector<int>{0, 1});
        REQUIRE(f.blocks.size() == 2);
        CHECK(f.kinds[0] == BlockKind::Primitive);
        CHECK(f.kinds[1] == BlockKind::Primitive);
        CHECK(upper_block_triangular(f));
    }
    SUBCASE("singleton condensation reordered") {
        IntMat a = mk({{0, 0, 1}, {0, 2, 0}, {0, 4, 0}});
        FrobeniusForm f = frobenius_form(a);
        REQUIRE(f.blocks.size() == 3);
        CHECK(f.blocks[0] == std::vector<int>{0});
        CHECK(f.blocks[1] == std::vector<int>{2});
        CHECK(f.blocks[2] == std::vector<int>{1});
        CHECK(f.kinds[0] == BlockKind::Zero);
        CHECK(f.kinds[1] == BlockKind::Zero);
        CHECK(f.kinds[2] == BlockKind::Primitive);
        CHECK(upper_block_triangular(f));
        // permutation validity: permuted == P^t A P entrywise
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(f.permuted[i][j] == a[f.permutation[i]][f.permutation[j]]);
    }
    SUBCASE("identity splits into unit blocks") {
        FrobeniusForm f = frobenius_form(mat_identity(2));
        CHECK(f.blocks.size() == 2);
        CHECK(f.kinds[0] == BlockKind::Primitive);
        CHECK(f.kinds[1] == BlockKind::Primitive);
    }
}

TEST_CASE("is_primitive") {
    CHECK(is_primitive(mk({{1, 1}, {1, 0}})));
    CHECK_FALSE(is_primitive(mk({{0, 1}, {1, 0}})));
    CHECK(is_primitive(mk({{3}})));
    CHECK_FALSE(is_primitive(mk({{0}})));
}

TEST_CASE("period") {
    CHECK(period(mk({{0, 1}, {1, 0}})) == 2);
    CHECK(period(mk({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})) == 3);
    CHECK(period(mk({{1, 1}, {1, 0}})) == 1);
    CHECK_THROWS_WITH_AS(period(mk({{1, 1}, {0, 1}})), doctest::Contains("NotIrreducible"),
                         Error);
}

TEST_CASE("lemma41_exponent") {
    SUBCASE("already primitive blocks") {
        auto [ell, f] = lemma41_exponent(mk({{1, 1}, {0, 3}}));
        CHECK(ell == 1);
        CHECK(f.all_primitive_or_zero());
    }
    SUBCASE("period-2 swap needs the square") {
        auto [ell, f] = lemma41_exponent(mk({{0, 1}, {1, 0}}));
        CHECK(ell == 2);
        REQUIRE(f.blocks.size() == 2);
        CHECK(f.kinds[0] == BlockKind::Primitive);
        CHECK(f.kinds[1] == BlockKind::Primitive);
    }
    SUBCASE("zero blocks are allowed") {
        auto [ell, f] = lemma41_exponent(mk({{0, 0, 1}, {0, 2, 0}, {0, 4, 0}}));
        CHECK(ell == 1);
        CHECK(f.all_primitive_or_zero());
    }
}

TEST_CASE("primitive iff irreducible with period 1 (2x2 sweep)") {
    for (int bits = 0; bits < 81; ++bits) {
        int v = bits;
        IntMat a(2, IntVec(2));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                a[i][j] = v % 3;
                v /= 3;
            }
        bool prim = is_primitive(a);
        CHECK(prim == primitive_by_powers(a));
        bool irr = is_irreducible(a);
        CHECK(prim == (irr && (irr ? period(a) == 1 : false)));
    }
}

TEST_CASE("powers of irreducible matrices (Lemma 4.1 part i, small sweep)") {
    for (int bits = 0; bits < 81; ++bits) {
        int v = bits;
        IntMat a(2, IntVec(2));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                a[i][j] = v % 3;
                v /= 3;
            }
        bool all_irreducible = true;
        for (int n = 1; n <= 6 && all_irreducible; ++n)
            if (!is_irreducible(mat_pow(a, n))) all_irreducible = false;
        if (all_irreducible) CHECK(is_primitive(a));
    }
}

TEST_SUITE_END();
