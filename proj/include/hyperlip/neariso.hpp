#pragma once

#include <string>
#include <vector>

#include "hyperlip/classify.hpp"

namespace hyperlip {

// Level-indexed vertex map between two leveled graphs, bijective off finite
// exception sets, with an empirically measured additive distortion bound.
struct SigmaMap {
    LeveledGraph domain;
    LeveledGraph target;
    // per domain level and vertex: (target level, target index); (-1,-1) unmapped
    std::vector<std::vector<std::pair<int, int>>> map;
    std::vector<std::string> exceptions_domain;
    std::vector<std::string> exceptions_target;
    int measured_distortion = -1;
    bool exhaustive = false;
    std::vector<int> depths_checked;
    long long k_exponent = 1; // telescoping applied before construction

    std::pair<int, int> image(int level, int index) const { return map[level][index]; }
};

struct TargetY {
    int copies = 0;
    int block = 0; // u consecutive vertices per horizontal clique
    LeveledGraph graph;
};

// Union of `ell` plain N-ary trees tiled by u-blocks; u must divide ell.
TargetY build_target(int ell, int u, int N, int depth);

// Prop 4.2 construction for a component whose descendant subgraph carries a
// primitive incidence matrix: strict rearrangement groups the offspring
// components into weight-u·N^k runs assigned to consecutive target blocks.
SigmaMap sigma_primitive(const LeveledGraph& g, int level, const std::vector<int>& members,
                         int depth, long long k_budget = 6);

// Whole-graph construction onto the plain N-ary tree: the block-triangular
// sweep places same-block offspring through quasi-rearranging matrices and
// scatters later-block components into the remaining slots.
SigmaMap sigma_general(const LeveledGraph& g, const ClassificationReport& report, int depth);

// Prop 2.8 map from the plain N-ary tree into a union of ell plain copies.
SigmaMap sigma_union(const LeveledGraph& union_graph);

// Max |d(sigma x, sigma y) - d(x,y)| over mapped pairs with levels ≤ depth
// (deterministic sample above pair_budget); updates the map's fields.
int verify_distortion(SigmaMap& sigma, int depth, long long pair_budget = 4000000);

} // namespace hyperlip
