#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"

using namespace hyperlip;
using hyperlip::testing::cantor3;
using hyperlip::testing::component_names;
using hyperlip::testing::five_map_system;
using hyperlip::testing::planar_pair;

TEST_SUITE_BEGIN("augtree");

TEST_CASE("build_explicit") {
    SUBCASE("single pair edge") {
        LeveledGraph g = build_explicit(2, 3, {{{1, 1}, {1, 2}}});
        CHECK(g.levels[2].hedges.size() == 1);
        CHECK(g.levels[1].hedges.empty());
        CHECK(g.levels[3].hedges.empty());
        CHECK_FALSE(g.closure_violation().has_value());
    }
    SUBCASE("plain binary tree") {
        LeveledGraph g = build_explicit(2, 2, {});
        CHECK(g.level_size(2) == 4);
        for (int n = 0; n <= 2; ++n) CHECK(g.levels[n].hedges.empty());
    }
    SUBCASE("closure violation rejected") {
        CHECK_THROWS_WITH_AS(build_explicit(2, 2, {{{1, 1}, {2, 2}}}),
                             doctest::Contains("ClosureViolation"), Error);
    }
}

TEST_CASE("build_from_ifs on the five-map example") {
    auto sys = five_map_system();
    LeveledGraph g = build_from_ifs(sys, 3);

    SUBCASE("level-1 edge set is {(2,3)}") {
        REQUIRE(g.levels[1].hedges.size() == 1);
        CHECK(g.levels[1].names[g.levels[1].hedges[0].first] == "2");
        CHECK(g.levels[1].names[g.levels[1].hedges[0].second] == "3");
    }
    SUBCASE("level-2 components") {
        auto comps = component_names(g, 2);
        std::vector<std::vector<std::string>> expect{
            {"11"}, {"12", "13"}, {"21", "31"}, {"22", "23"}, {"32", "33"}};
        CHECK(comps == expect);
    }
    SUBCASE("level-3 components: 1 singleton + 13 pairs") {
        auto comps = component_names(g, 3);
        CHECK(comps.size() == 14);
        int singles = 0, pairs = 0;
        for (const auto& c : comps) (c.size() == 1 ? singles : pairs)++;
        CHECK(singles == 1);
        CHECK(pairs == 13);
    }
    SUBCASE("Def 2.1 closure holds") {
        CHECK_FALSE(g.closure_violation().has_value());
    }
}

TEST_CASE("strongly separated system has no horizontal edges") {
    LeveledGraph g = build_from_ifs(cantor3(), 3);
    for (int n = 0; n <= 3; ++n) CHECK(g.levels[n].hedges.empty());
}

TEST_CASE("components at the root") {
    LeveledGraph g = build_explicit(2, 1, {});
    auto comps = components(g, 0);
    REQUIRE(comps.size() == 1);
    CHECK(g.levels[0].names[comps[0][0]] == "o");
}

TEST_CASE("geodesics and Gromov products") {
    auto sys = five_map_system();
    LeveledGraph g = build_from_ifs(sys, 4);
    GraphMetrics m(g);
    auto at = [&](const std::string& name) { return *g.find_vertex(name); };

    SUBCASE("horizontal edge distance") {
        GeodesicSummary s = m.geodesic(at("2"), at("3"));
        CHECK(s.distance == 1);
        CHECK(s.bend_level == 1);
        CHECK(s.horizontal_length == 1);
    }
    SUBCASE("cross pair ascends to the touching parents") {
        GeodesicSummary s = m.geodesic(at("22"), at("33"));
        CHECK(s.distance == 3);
        CHECK(s.bend_level == 1);
        CHECK(s.horizontal_length == 1);
    }
    SUBCASE("identical vertices") {
        GeodesicSummary s = m.geodesic(at("22"), at("22"));
        CHECK(s.distance == 0);
        CHECK(s.horizontal_length == 0);
    }
    SUBCASE("gromov products") {
        CHECK(m.gromov_product(at("22"), at("33")) == Rational(1, 2));
        CHECK(m.gromov_product(at("22"), at("22")) == Rational(2));
        // plain-tree pair: lca at level 1
        CHECK(m.gromov_product(at("11"), at("12")) == Rational(1));
    }
    SUBCASE("hyperbolic metric values") {
        CHECK(m.hyperbolic_metric(at("22"), at("22"), 1.0) == 0.0);
        double rho = m.hyperbolic_metric(at("22"), at("33"), std::log(5.0));
        CHECK(rho == doctest::Approx(1.0 / std::sqrt(5.0)));
        CHECK(m.hyperbolic_metric(at("o"), at("1"), 1.0) == doctest::Approx(1.0));
    }
}

TEST_CASE("geodesic agrees with breadth-first search") {
    std::vector<LeveledGraph> graphs;
    graphs.push_back(build_from_ifs(five_map_system(), 4));
    graphs.push_back(build_explicit(2, 4, {{{1, 1}, {1, 2}}}));
    {
        auto base = cantor3();
        auto shifted = std::make_shared<SimilitudeSystem>(
            translate_system(*base, RatVec{Rational(1)}));
        LeveledGraph a = build_from_ifs(base, 3);
        LeveledGraph b = build_from_ifs(shifted, 3);
        graphs.push_back(union_graphs({&a, &b}, 4));
    }
    for (const auto& g : graphs) {
        GraphMetrics m(g);
        for (int n = 0; n <= g.depth; ++n)
            for (int i = 0; i < g.level_size(n); ++i) {
                auto bfs = m.bfs_distances({n, i});
                for (int n2 = 0; n2 <= g.depth; ++n2)
                    for (int i2 = 0; i2 < g.level_size(n2); ++i2)
                        CHECK(m.distance({n, i}, {n2, i2}) == bfs[n2][i2]);
            }
    }
}

TEST_CASE("quotient tree") {
    auto sys = five_map_system();
    LeveledGraph g = build_from_ifs(sys, 2);
    LeveledGraph q = quotient_tree(g);

    SUBCASE("level sizes follow the component counts") {
        CHECK(q.level_size(0) == 1);
        CHECK(q.level_size(1) == 2);
        CHECK(q.level_size(2) == 5);
        for (int n = 0; n <= 2; ++n) CHECK(q.levels[n].hedges.empty());
    }
    SUBCASE("parents collapse correctly") {
        auto v = q.find_vertex("{22,23}");
        REQUIRE(v.has_value());
        CHECK(q.name(q.parent_of(*v)) == "{2,3}");
    }
    SUBCASE("plain tree quotient is the tree itself") {
        LeveledGraph t = build_explicit(2, 3, {});
        LeveledGraph qt = quotient_tree(t);
        for (int n = 0; n <= 3; ++n) CHECK(qt.level_size(n) == t.level_size(n));
    }
    SUBCASE("explicit pair collapses to one vertex") {
        LeveledGraph e = build_explicit(2, 2, {{{1, 1}, {1, 2}}});
        LeveledGraph qe = quotient_tree(e);
        CHECK(qe.level_size(2) == 3);
        CHECK(qe.find_vertex("{11,12}").has_value());
    }
}

TEST_CASE("gromov sandwich") {
    SUBCASE("five-map example") {
        LeveledGraph g = build_from_ifs(five_map_system(), 4);
        SandwichResult r = gromov_sandwich_check(g, 4);
        CHECK(r.holds);
        CHECK(r.k == 2);
    }
    SUBCASE("plain tree: products equal, k = 1") {
        LeveledGraph g = build_explicit(3, 3, {});
        SandwichResult r = gromov_sandwich_check(g, 3);
        CHECK(r.holds);
        CHECK(r.k == 1);
        CHECK(r.max_defect_x2 == 0);
    }
    SUBCASE("explicit pair example") {
        LeveledGraph g = build_explicit(2, 3, {{{1, 1}, {1, 2}}});
        SandwichResult r = gromov_sandwich_check(g, 3);
        CHECK(r.holds);
        CHECK(r.k == 2);
    }
}

TEST_CASE("unions") {
    auto base = cantor3();

    SUBCASE("disjoint translates produce no cross edges") {
        auto shifted = std::make_shared<SimilitudeSystem>(
            translate_system(*base, RatVec{Rational(2)}));
        LeveledGraph a = build_from_ifs(base, 3);
        LeveledGraph b = build_from_ifs(shifted, 3);
        LeveledGraph u = union_graphs({&a, &b}, 4);
        for (int n = 0; n <= 4; ++n) CHECK(u.levels[n].hedges.empty());
    }
    SUBCASE("touching translate meets exactly on the diagonal words") {
        auto shifted = std::make_shared<SimilitudeSystem>(
            translate_system(*base, RatVec{Rational(1)}));
        LeveledGraph a = build_from_ifs(base, 3);
        LeveledGraph b = build_from_ifs(shifted, 3);
        LeveledGraph u = union_graphs({&a, &b}, 4);
        // level k ≥ 1 carries exactly the edge (a 2^{k-1}, b 1^{k-1})
        for (int n = 1; n <= 4; ++n) {
            REQUIRE(u.levels[n].hedges.size() == 1);
            auto [x, y] = u.levels[n].hedges[0];
            std::string left = "a" + std::string(n - 1, '2');
            std::string right = "b" + std::string(n - 1, '1');
            CHECK(u.levels[n].names[x] == left);
            CHECK(u.levels[n].names[y] == right);
        }
    }
    SUBCASE("planar pair touches along the diagonal") {
        auto [k1, k2] = planar_pair();
        LeveledGraph a = build_from_ifs(k1, 3);
        LeveledGraph b = build_from_ifs(k2, 3);
        LeveledGraph u = union_graphs({&a, &b}, 4);
        REQUIRE(u.levels[1].hedges.size() == 1); // roots touch
        // level 2: exactly the diagonal pairs (a1,b1), (a2,b2)
        auto comps = component_names(u, 2);
        std::vector<std::vector<std::string>> expect{
            {"a1", "b1"}, {"a2", "b2"}, {"a3"}, {"b3"}};
        CHECK(comps == expect);
    }
}

TEST_CASE("telescope") {
    auto sys = five_map_system();
    LeveledGraph g = build_from_ifs(sys, 4);

    SUBCASE("k = 1 is the identity") {
        LeveledGraph t = telescope(g, 1);
        CHECK(t.depth == g.depth);
        CHECK(t.alphabet == g.alphabet);
    }
    SUBCASE("five-map example at k = 2") {
        LeveledGraph t = telescope(g, 2);
        CHECK(t.alphabet == 9);
        CHECK(t.depth == 2);
        // level-1 components of the telescoped graph = level-2 components
        CHECK(component_names(t, 1) == component_names(g, 2));
    }
    SUBCASE("explicit pair example at k = 2") {
        LeveledGraph e = build_explicit(2, 4, {{{1, 1}, {1, 2}}});
        LeveledGraph t = telescope(e, 2);
        CHECK(t.alphabet == 4);
        REQUIRE(t.levels[1].hedges.size() == 1);
        CHECK(t.levels[1].names[t.levels[1].hedges[0].first] == "11");
        CHECK(t.levels[1].names[t.levels[1].hedges[0].second] == "12");
    }
    SUBCASE("depth must be a multiple of k") {
        CHECK_THROWS_AS(telescope(build_explicit(2, 3, {}), 2), Error);
    }
}

TEST_CASE("hyperbolicity witness") {
    SUBCASE("plain tree is 0-hyperbolic") {
        LeveledGraph g = build_explicit(2, 4, {});
        HyperbolicityWitness w = hyperbolicity_witness(g);
        CHECK(w.max_horizontal_part == 0);
        CHECK(w.delta_x2 == 0);
        CHECK_FALSE(w.sampled);
    }
    SUBCASE("five-map example horizontal parts stay short") {
        LeveledGraph g = build_from_ifs(five_map_system(), 4);
        HyperbolicityWitness w = hyperbolicity_witness(g);
        CHECK(w.max_horizontal_part == 1);
    }
    SUBCASE("explicit pair example") {
        LeveledGraph g = build_explicit(2, 4, {{{1, 1}, {1, 2}}});
        HyperbolicityWitness w = hyperbolicity_witness(g);
        CHECK(w.max_horizontal_part == 1);
    }
}

TEST_CASE("DOT export and import round-trip") {
    LeveledGraph g = build_explicit(2, 3, {{{1, 1}, {1, 2}}, {{1, 1, 1}, {1, 1, 2}}});
    std::string dot = export_dot(g);
    CHECK(dot.find("\"o\" -> \"1\";") != std::string::npos);
    CHECK(dot.find("[dir=none, constraint=false]") != std::string::npos);

    LeveledGraph back = import_dot(dot);
    CHECK(back.depth == g.depth);
    CHECK(back.alphabet == g.alphabet);
    for (int n = 0; n <= g.depth; ++n) {
        CHECK(back.levels[n].names == g.levels[n].names);
        CHECK(back.levels[n].parent == g.levels[n].parent);
        CHECK(back.levels[n].hedges == g.levels[n].hedges);
    }

    SUBCASE("level ranges restrict the output") {
        std::string partial = export_dot(g, 0, 1);
        CHECK(partial.find("\"11\"") == std::string::npos);
    }
    SUBCASE("quotient trees export too") {
        std::string qdot = export_dot(quotient_tree(g));
        CHECK(qdot.find("{11,12}") != std::string::npos);
    }
}

TEST_SUITE_END();
