#pragma once

#include <string>
#include <vector>

#include "hyperlip/augtree.hpp"
#include "hyperlip/matstruct.hpp"

namespace hyperlip {

enum class Verdict { Simple, Inconclusive };

struct ClassInfo {
    int level = 0;                          // level of the representative
    std::vector<std::string> representative; // member names
    long long size = 0;                      // u_i
};

struct ClassificationReport {
    Verdict verdict = Verdict::Inconclusive;
    int budget = 0;
    int stabilization_depth = -1; // smallest t with partition(t) = partition(t+1)
    std::vector<ClassInfo> classes;
    std::vector<long long> sizes; // u
    IntMat incidence;             // filled only for Simple
    int alphabet = 0;             // N of the classified graph

    // class index of every component at levels 1..budget (+1 when closed)
    std::vector<std::vector<int>> class_of_component;
};

// Partition-refinement classification of horizontal components by canonical
// forms of depth-truncated descendant subgraphs; Simple is claimed only on a
// stable, offspring-closed partition. Components larger than `component_cap`
// raise CapExceeded.
ClassificationReport classify(const LeveledGraph& g, int budget, int component_cap = 12);

// Classification of the descendant subgraph of one component (the component
// itself sits at relative level 0).
ClassificationReport subgraph_incidence(const LeveledGraph& g, int level,
                                        const std::vector<int>& members, int budget,
                                        int component_cap = 12);

// Same, but on an already-extracted subgraph whose level 0 is a component.
ClassificationReport classify_rooted(const LeveledGraph& sub, int budget,
                                     int component_cap = 12);

// Prop 2.7 identity A u = N u, checked exactly.
bool verify_eigen(const ClassificationReport& report, long long N);

} // namespace hyperlip
