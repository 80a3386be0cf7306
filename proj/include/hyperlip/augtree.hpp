#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperlip/geometry.hpp"

namespace hyperlip {

enum class GraphSource { Ifs, ExplicitRule, DigitRule, Union, Telescope, Quotient };

std::string source_name(GraphSource s);

// Vertex handle: level plus index within the level (levels are lex-ordered).
struct VertexRef {
    int level = -1;
    int index = -1;
    bool operator==(const VertexRef&) const = default;
};

// Depth-truncated augmented tree. Vertical edges are implicit through the
// per-level parent vector; horizontal adjacency is explicit per level.
// Level 0 may hold several roots (a horizontal component and its internal
// edges) so that descendant subgraphs are graphs of the same kind.
struct LeveledGraph {
    int alphabet = 0; // out-degree of every vertex below the root level
    int depth = 0;
    GraphSource source = GraphSource::ExplicitRule;

    struct Level {
        std::vector<std::string> names;
        std::vector<int> parent;                 // empty on level 0
        std::vector<std::pair<int, int>> hedges; // canonical (a < b), sorted
    };
    std::vector<Level> levels;

    // present when source == Ifs (used by unions to recompute cross edges)
    std::shared_ptr<const SimilitudeSystem> system;
    // for unions of IFS graphs: one system per level-1 root
    std::vector<std::shared_ptr<const SimilitudeSystem>> part_systems;

    int level_size(int n) const { return (int)levels[n].names.size(); }
    const std::string& name(VertexRef v) const { return levels[v.level].names[v.index]; }
    VertexRef parent_of(VertexRef v) const;
    VertexRef ancestor(VertexRef v, int level) const;
    std::pair<int, int> children_range(int level, int index) const; // [lo,hi) at level+1
    std::optional<VertexRef> find_vertex(const std::string& name) const;
    std::vector<std::vector<int>> adjacency(int level) const;

    // Def 2.1 closure: each edge's endpoints share a parent or the parents
    // are themselves adjacent. Returns the offending edge if any.
    std::optional<std::pair<std::string, std::string>> closure_violation() const;
};

// --- builders ------------------------------------------------------------

LeveledGraph build_explicit(int alphabet, int depth,
                            const std::vector<std::pair<Word, Word>>& edges);

LeveledGraph build_from_ifs(std::shared_ptr<const SimilitudeSystem> system, int depth,
                            int refine_budget = 12);

// Example-2.11 style rule: one edge (1^p, 1^{p-1}2) per p in `rungs`.
LeveledGraph build_ladder(int depth, const std::vector<int>& rungs);

// Union graph for the two-copy Cantor configuration with a unique signed
// expansion: copies a (C) and b (C+alpha), cross edges by digit agreement.
LeveledGraph build_alpha_rule(const SignedTernary& expansion, int depth);

// New root joined to every part root; parts shifted one level down. When all
// parts carry IFS systems (equal dimension and ratio) the horizontal edges
// are recomputed across copies by the intersection oracle; otherwise each
// part keeps its own edges and no cross edges are added.
LeveledGraph union_graphs(const std::vector<const LeveledGraph*>& parts, int depth,
                          int refine_budget = 12);

// Every k-th level; alphabet becomes N^k.
LeveledGraph telescope(const LeveledGraph& g, int k);

// Union of `ell` plain N-ary trees whose levels are tiled by horizontal
// cliques over `u` consecutive vertices; requires u | ell.
LeveledGraph build_target_graph(int ell, int u, int N, int depth);

// Keep only levels 0..new_depth.
LeveledGraph truncate_graph(const LeveledGraph& g, int new_depth);

// Extract the descendant subgraph of a level-n horizontal component; level 0
// of the result is the component itself with its internal edges.
LeveledGraph component_subgraph(const LeveledGraph& g, int level,
                                const std::vector<int>& members);

// --- components ----------------------------------------------------------

// Partition of a level into horizontal components, members sorted, blocks
// ordered by first member.
std::vector<std::vector<int>> components(const LeveledGraph& g, int level);

// Precomputed component structure for the whole graph.
struct ComponentStructure {
    struct Comp {
        int level = 0;
        std::vector<int> members;           // sorted vertex indices
        std::vector<std::vector<int>> adj;  // internal adjacency (member positions)
        int parent_comp = -1;               // component index at level-1
        std::vector<int> parent_attach;     // per member: parent's member position
        std::vector<int> children;          // component indices at level+1
    };
    std::vector<std::vector<Comp>> by_level;
    std::vector<std::vector<int>> comp_of;  // per level: vertex -> component index
};

ComponentStructure analyze_components(const LeveledGraph& g);

// --- metrics -------------------------------------------------------------

struct GeodesicSummary {
    int distance = 0;
    int bend_level = 0;        // level of the horizontal part
    int horizontal_length = 0; // h; distance = |x| + |y| - 2*bend + h
};

// Distance oracle: d(x,y) = min over ancestor levels m of
// (|x|-m) + (|y|-m) + h_m with h_m the horizontal distance at level m.
class GraphMetrics {
public:
    explicit GraphMetrics(const LeveledGraph& g);

    GeodesicSummary geodesic(VertexRef x, VertexRef y) const;
    int distance(VertexRef x, VertexRef y) const { return geodesic(x, y).distance; }
    // Doubled Gromov product (an integer), so half-integers stay exact.
    int gromov_product_x2(VertexRef x, VertexRef y) const;
    Rational gromov_product(VertexRef x, VertexRef y) const;
    double hyperbolic_metric(VertexRef x, VertexRef y, double a) const;

    const ComponentStructure& comps() const { return comps_; }
    const LeveledGraph& graph() const { return *g_; }

    // BFS over the explicit edge set (vertical + horizontal); test oracle.
    std::vector<std::vector<int>> bfs_distances(VertexRef src) const;

private:
    const LeveledGraph* g_;
    ComponentStructure comps_;
    // per level, per component: all-pairs horizontal distances (-1 = none)
    std::vector<std::vector<std::vector<std::vector<int>>>> comp_dist_;
};

LeveledGraph quotient_tree(const LeveledGraph& g);

struct SandwichResult {
    bool holds = false;
    int k = 1;              // max component size (≥ 1)
    int max_defect_x2 = 0;  // max over pairs of 2*(gp_Q - gp_X)
};

// Verifies 0 ≤ |⌊x⌋∧⌊y⌋| - |x∧y| ≤ k for all pairs up to `depth`, together
// with the induced metric comparison e^{-ka} ρ_a(x,y) ≤ ρ_a(⌊x⌋,⌊y⌋) ≤ ρ_a(x,y).
SandwichResult gromov_sandwich_check(const LeveledGraph& g, int depth);

struct HyperbolicityWitness {
    int max_horizontal_part = 0;
    int delta_x2 = 0; // doubled hyperbolicity constant from Gromov triples
    bool sampled = false;
};

HyperbolicityWitness hyperbolicity_witness(const LeveledGraph& g,
                                           long long pair_threshold = 1000000);

// --- DOT -----------------------------------------------------------------

std::string export_dot(const LeveledGraph& g, int level_lo = 0, int level_hi = -1);
LeveledGraph import_dot(const std::string& text);

std::string word_to_name(const Word& w);
Word name_to_word(const std::string& name, int alphabet);

} // namespace hyperlip
