#include <doctest.h>

#include <algorithm>
#include <set>

#include "hyperlip/neariso.hpp"
#include "test_helpers.hpp"

using namespace hyperlip;
using hyperlip::testing::cantor3;
using hyperlip::testing::five_map_system;

namespace {

// explicit graph where every sibling pair (w1, w2) is joined; its single
// class has incidence [[2]] with u = [2]
LeveledGraph pair_ladder(int depth) {
    std::vector<std::pair<Word, Word>> edges;
    std::vector<Word> words{{}};
    for (int n = 1; n <= depth; ++n) {
        std::vector<Word> next;
        for (const auto& w : words) {
            Word a = w, b = w;
            a.push_back(1);
            b.push_back(2);
            edges.emplace_back(a, b);
            next.push_back(a);
            next.push_back(b);
        }
        words = next;
    }
    return build_explicit(2, depth, edges);
}

std::string image_name(const SigmaMap& s, const std::string& domain_name) {
    auto v = s.domain.find_vertex(domain_name);
    REQUIRE(v.has_value());
    auto [tl, ti] = s.image(v->level, v->index);
    REQUIRE(tl >= 0);
    return s.target.levels[tl].names[ti];
}

void check_level_bijection(const SigmaMap& s, int off) {
    for (int n = 0; n <= s.domain.depth; ++n) {
        std::set<int> used;
        for (int i = 0; i < s.domain.level_size(n); ++i) {
            auto [tl, ti] = s.image(n, i);
            REQUIRE(tl == n + off);
            CHECK(used.insert(ti).second);
        }
        CHECK((int)used.size() == s.target.level_size(n + off));
    }
}

} // namespace

TEST_SUITE_BEGIN("neariso");

TEST_CASE("build_target") {
    SUBCASE("two copies in pairs") {
        TargetY y = build_target(2, 2, 3, 3);
        CHECK(y.graph.level_size(1) == 2);
        CHECK(y.graph.level_size(2) == 6);
        CHECK(y.graph.level_size(3) == 18);
        // every level is tiled by pair cliques
        for (int n = 1; n <= 3; ++n)
            CHECK((int)y.graph.levels[n].hedges.size() == y.graph.level_size(n) / 2);
        CHECK_FALSE(y.graph.closure_violation().has_value());
    }
    SUBCASE("single plain copy") {
        TargetY y = build_target(1, 1, 3, 2);
        CHECK(y.graph.level_size(1) == 1);
        CHECK(y.graph.level_size(2) == 3);
        for (int n = 0; n <= 2; ++n) CHECK(y.graph.levels[n].hedges.empty());
    }
    SUBCASE("divisibility") {
        CHECK_THROWS_WITH_AS(build_target(3, 2, 3, 2),
                             doctest::Contains("DivisibilityViolation"), Error);
    }
}

TEST_CASE("sigma_union") {
    SUBCASE("three symbols, two copies: the explicit map") {
        LeveledGraph target = build_target_graph(2, 1, 3, 5);
        SigmaMap s = sigma_union(target);
        CHECK(image_name(s, "1") == "a");
        CHECK(image_name(s, "2") == "b1");
        CHECK(image_name(s, "31") == "b2");
        CHECK(image_name(s, "3") == "b");
        CHECK(image_name(s, "33") == "b3");
        CHECK(image_name(s, "32") == "b31");
        // subtree extension sigma(i_s u) = j_s u
        CHECK(image_name(s, "12") == "a2");
        CHECK(image_name(s, "21") == "b11");

        int measured = verify_distortion(s, 4, 1000000);
        CHECK(s.exhaustive);
        CHECK(measured <= 1); // floor(2/3) + 1
    }
    SUBCASE("single copy shifts one level") {
        LeveledGraph target = build_target_graph(1, 1, 3, 4);
        SigmaMap s = sigma_union(target);
        CHECK(image_name(s, "1") == "a1");
        CHECK(image_name(s, "3") == "a");
        int measured = verify_distortion(s, 3, 1000000);
        CHECK(measured <= 1);
    }
    SUBCASE("two symbols, four copies") {
        LeveledGraph target = build_target_graph(4, 1, 2, 5);
        SigmaMap s = sigma_union(target);
        int measured = verify_distortion(s, 4, 1000000);
        CHECK(measured <= 3); // floor(4/2) + 1
    }
}

TEST_CASE("sigma_primitive on the five-map pair component") {
    LeveledGraph g = build_from_ifs(five_map_system(), 5);
    auto comps = components(g, 1);
    REQUIRE(comps.size() == 2);
    SigmaMap s = sigma_primitive(g, 1, comps[1], 5); // T = {2,3}

    // domain levels align with target levels shifted by one
    check_level_bijection(s, 1);
    CHECK(s.target.level_size(1) == 2);
    CHECK(s.k_exponent == 1);
    CHECK(s.exceptions_target == std::vector<std::string>{"o"});

    int measured = verify_distortion(s, 4, 1000000);
    CHECK(s.exhaustive);
    CHECK(measured <= 3);
}

TEST_CASE("sigma_primitive on the pair ladder") {
    LeveledGraph g = pair_ladder(5);
    auto comps = components(g, 1);
    REQUIRE(comps.size() == 1);
    REQUIRE(comps[0].size() == 2);
    SigmaMap s = sigma_primitive(g, 1, comps[0], 5);
    check_level_bijection(s, 1);
    CHECK(s.target.alphabet == 2);
    CHECK(s.target.level_size(1) == 2);
    int measured = verify_distortion(s, 4, 1000000);
    CHECK(measured <= 3);
}

TEST_CASE("sigma_primitive rejects non-primitive subgraphs") {
    LeveledGraph g = build_explicit(2, 6, {{{1, 1}, {1, 2}}});
    auto comps = components(g, 2); // {11,12} has offspring of another class only
    REQUIRE(comps[0].size() == 2);
    CHECK_THROWS_WITH_AS(sigma_primitive(g, 2, comps[0], 6),
                         doctest::Contains("NotPrimitive"), Error);
}

TEST_CASE("sigma_general on the five-map example") {
    LeveledGraph g = build_from_ifs(five_map_system(), 5);
    ClassificationReport rep = classify(g, 3);
    REQUIRE(rep.verdict == Verdict::Simple);

    SigmaMap s = sigma_general(g, rep, 5);
    check_level_bijection(s, 0);
    CHECK(s.exceptions_domain.empty());
    CHECK(s.exceptions_target.empty());
    CHECK(image_name(s, "o") == "o");

    int measured = verify_distortion(s, 4, 1000000);
    CHECK(s.exhaustive);
    CHECK(measured >= 1);
    CHECK(measured <= 9);
}

TEST_CASE("sigma_general is the identity shape on a plain tree") {
    LeveledGraph g = build_explicit(3, 4, {});
    ClassificationReport rep = classify(g, 2);
    REQUIRE(rep.verdict == Verdict::Simple);
    SigmaMap s = sigma_general(g, rep, 4);
    int measured = verify_distortion(s, 4, 1000000);
    CHECK(measured == 0);
}

TEST_CASE("sigma_general handles the explicit pair example with zero blocks") {
    LeveledGraph g = build_explicit(2, 6, {{{1, 1}, {1, 2}}});
    ClassificationReport rep = classify(g, 4);
    REQUIRE(rep.verdict == Verdict::Simple);
    SigmaMap s = sigma_general(g, rep, 6);
    check_level_bijection(s, 0);
    int measured = verify_distortion(s, 5, 1000000);
    CHECK(measured <= 3);
}

TEST_CASE("first-block cohesion: pair images share a parent") {
    // alpha = 1 union: the leading class is the touching pair
    auto base = cantor3();
    auto shifted =
        std::make_shared<SimilitudeSystem>(translate_system(*base, RatVec{Rational(1)}));
    LeveledGraph a = build_from_ifs(base, 5);
    LeveledGraph b = build_from_ifs(shifted, 5);
    LeveledGraph u = union_graphs({&a, &b}, 6);
    ClassificationReport rep = classify(u, 4);
    REQUIRE(rep.verdict == Verdict::Simple);
    REQUIRE(rep.sizes == std::vector<long long>{2, 1});

    SigmaMap s = sigma_general(u, rep, 6);
    check_level_bijection(s, 0);
    ComponentStructure cs = analyze_components(u);
    for (int n = 2; n <= 6; ++n)
        for (int ci = 0; ci < (int)cs.by_level[n].size(); ++ci) {
            if (rep.class_of_component[n][ci] != 0) continue;
            const auto& members = cs.by_level[n][ci].members;
            std::set<int> parents;
            for (int v : members) {
                auto [tl, ti] = s.image(n, v);
                parents.insert(ti / s.target.alphabet);
            }
            CHECK(parents.size() == 1);
        }
    int measured = verify_distortion(s, 5, 1000000);
    CHECK(measured <= 9);
}

TEST_CASE("distortion bounds transfer to Gromov products") {
    LeveledGraph g = build_from_ifs(five_map_system(), 4);
    ClassificationReport rep = classify(g, 2);
    REQUIRE(rep.verdict == Verdict::Simple);
    SigmaMap s = sigma_general(g, rep, 4);
    int measured = verify_distortion(s, 4, 1000000);

    GraphMetrics dm(s.domain), tm(s.target);
    int worst = 0;
    for (int n1 = 0; n1 <= 4; ++n1)
        for (int i1 = 0; i1 < s.domain.level_size(n1); ++i1)
            for (int n2 = n1; n2 <= 4; ++n2)
                for (int i2 = 0; i2 < s.domain.level_size(n2); ++i2) {
                    auto [tl1, ti1] = s.image(n1, i1);
                    auto [tl2, ti2] = s.image(n2, i2);
                    int gx = dm.gromov_product_x2({n1, i1}, {n2, i2});
                    int gy = tm.gromov_product_x2({tl1, ti1}, {tl2, ti2});
                    worst = std::max(worst, gx > gy ? gx - gy : gy - gx);
                }
    CHECK(worst <= 2 * measured); // doubled products differ by at most 2c
}

TEST_CASE("distortion is stable across depths") {
    LeveledGraph g = build_from_ifs(five_map_system(), 5);
    ClassificationReport rep = classify(g, 3);
    std::vector<int> measured;
    for (int depth : {3, 4, 5}) {
        SigmaMap s = sigma_general(g, rep, depth);
        measured.push_back(verify_distortion(s, depth, 1000000));
    }
    CHECK(measured[0] == measured[1]);
    CHECK(measured[1] == measured[2]);
}

TEST_SUITE_END();
