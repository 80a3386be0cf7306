#include "hyperlip/augtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hyperlip/parallel.hpp"

namespace hyperlip {

std::string source_name(GraphSource s) {
    switch (s) {
        case GraphSource::Ifs: return "ifs";
        case GraphSource::ExplicitRule: return "explicit";
        case GraphSource::DigitRule: return "digit-rule";
        case GraphSource::Union: return "union";
        case GraphSource::Telescope: return "telescope";
        case GraphSource::Quotient: return "quotient";
    }
    return "?";
}

VertexRef LeveledGraph::parent_of(VertexRef v) const {
    require(v.level > 0, "InvalidArgument", "root has no parent");
    return VertexRef{v.level - 1, levels[v.level].parent[v.index]};
}

VertexRef LeveledGraph::ancestor(VertexRef v, int level) const {
    require(level <= v.level, "InvalidArgument", "ancestor level above vertex");
    while (v.level > level) v = parent_of(v);
    return v;
}

std::pair<int, int> LeveledGraph::children_range(int level, int index) const {
    if (level + 1 > depth) return {0, 0};
    const auto& par = levels[level + 1].parent;
    auto lo = std::lower_bound(par.begin(), par.end(), index);
    auto hi = std::upper_bound(par.begin(), par.end(), index);
    return {(int)(lo - par.begin()), (int)(hi - par.begin())};
}

std::optional<VertexRef> LeveledGraph::find_vertex(const std::string& name) const {
    for (int n = 0; n <= depth; ++n) {
        const auto& names = levels[n].names;
        for (int i = 0; i < (int)names.size(); ++i)
            if (names[i] == name) return VertexRef{n, i};
    }
    return std::nullopt;
}

std::vector<std::vector<int>> LeveledGraph::adjacency(int level) const {
    std::vector<std::vector<int>> adj(level_size(level));
    for (auto [a, b] : levels[level].hedges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

std::optional<std::pair<std::string, std::string>> LeveledGraph::closure_violation() const {
    for (int n = 1; n <= depth; ++n) {
        std::set<std::pair<int, int>> up(levels[n - 1].hedges.begin(), levels[n - 1].hedges.end());
        for (auto [a, b] : levels[n].hedges) {
            int pa = levels[n].parent[a], pb = levels[n].parent[b];
            if (pa == pb) continue;
            auto key = std::minmax(pa, pb);
            if (!up.count({key.first, key.second}))
                return std::make_pair(levels[n].names[a], levels[n].names[b]);
        }
    }
    return std::nullopt;
}

std::string word_to_name(const Word& w) {
    if (w.empty()) return "o";
    std::string s;
    for (int sym : w) {
        require(sym >= 1 && sym <= 9, "InvalidWord", "word names need symbols in 1..9");
        s += char('0' + sym);
    }
    return s;
}

Word name_to_word(const std::string& name, int alphabet) {
    if (name == "o" || name.empty()) return {};
    Word w;
    for (char c : name) {
        require(c >= '1' && c <= '9', "InvalidWord", "bad symbol in word '" + name + "'");
        int sym = c - '0';
        require(sym <= alphabet, "InvalidWord", "symbol out of range in '" + name + "'");
        w.push_back(sym);
    }
    return w;
}

namespace {

void sort_hedges(std::vector<std::pair<int, int>>& hedges) {
    for (auto& e : hedges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(hedges.begin(), hedges.end());
    hedges.erase(std::unique(hedges.begin(), hedges.end()), hedges.end());
}

// Plain tree skeleton on symbols 1..N with root "o".
LeveledGraph plain_tree(int alphabet, int depth, GraphSource source) {
    LeveledGraph g;
    g.alphabet = alphabet;
    g.depth = depth;
    g.source = source;
    g.levels.resize(depth + 1);
    g.levels[0].names = {"o"};
    for (int n = 1; n <= depth; ++n) {
        auto& prev = g.levels[n - 1];
        auto& cur = g.levels[n];
        cur.names.reserve(prev.names.size() * alphabet);
        cur.parent.reserve(prev.names.size() * alphabet);
        for (int p = 0; p < (int)prev.names.size(); ++p) {
            const std::string& base = (n == 1) ? "" : prev.names[p];
            for (int s = 1; s <= alphabet; ++s) {
                require(s <= 9, "InvalidArgument", "alphabet beyond 9 needs derived names");
                cur.names.push_back(base + char('0' + s));
                cur.parent.push_back(p);
            }
        }
    }
    return g;
}

} // namespace

LeveledGraph build_explicit(int alphabet, int depth,
                            const std::vector<std::pair<Word, Word>>& edges) {
    require(alphabet >= 2, "InvalidArgument", "alphabet must be at least 2");
    require(depth >= 0, "InvalidArgument", "depth must be nonnegative");
    LeveledGraph g = plain_tree(alphabet, depth, GraphSource::ExplicitRule);

    auto index_of = [&](const Word& w) {
        int idx = 0;
        for (int sym : w) {
            require(sym >= 1 && sym <= alphabet, "InvalidWord", "symbol out of range");
            idx = idx * alphabet + (sym - 1);
        }
        return idx;
    };
    for (const auto& [wa, wb] : edges) {
        require(wa.size() == wb.size(), "InvalidArgument",
                "edge endpoints must share a level");
        require((int)wa.size() <= depth, "InvalidArgument", "edge beyond depth");
        require(!wa.empty() && wa != wb, "InvalidArgument", "degenerate edge");
        g.levels[wa.size()].hedges.emplace_back(index_of(wa), index_of(wb));
    }
    for (int n = 1; n <= depth; ++n) sort_hedges(g.levels[n].hedges);

    if (auto bad = g.closure_violation())
        fail("ClosureViolation",
             "edge (" + bad->first + "," + bad->second + ") has non-adjacent parents");
    return g;
}

LeveledGraph build_from_ifs(std::shared_ptr<const SimilitudeSystem> system, int depth,
                            int refine_budget) {
    require(system != nullptr, "InvalidArgument", "missing system");
    require(depth >= 1, "InvalidArgument", "depth must be positive");
    int N = system->branching();
    LeveledGraph g = plain_tree(N, depth, GraphSource::Ifs);
    g.system = system;

    CellIntersector oracle(*system, *system);
    std::vector<Word> prev_words{Word{}};
    for (int n = 1; n <= depth; ++n) {
        std::vector<Word> words;
        words.reserve(prev_words.size() * N);
        for (const auto& w : prev_words)
            for (int s = 1; s <= N; ++s) {
                Word c = w;
                c.push_back(s);
                words.push_back(std::move(c));
            }

        std::vector<std::pair<int, int>> candidates;
        if (n == 1) {
            for (int i = 0; i < N; ++i)
                for (int j = i + 1; j < N; ++j) candidates.emplace_back(i, j);
        } else {
            for (int p = 0; p < g.level_size(n - 1); ++p)
                for (int a = 0; a < N; ++a)
                    for (int b = a + 1; b < N; ++b)
                        candidates.emplace_back(p * N + a, p * N + b);
            for (auto [p, q] : g.levels[n - 1].hedges)
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b)
                        candidates.emplace_back(p * N + a, q * N + b);
        }
        for (auto [i, j] : candidates) {
            IntersectionVerdict v = oracle.query(words[i], words[j], refine_budget);
            if (v.outcome == Outcome::Unknown)
                fail("UndecidedIntersection",
                     "pair (" + word_to_name(words[i]) + "," + word_to_name(words[j]) +
                         ") undecided within refinement budget");
            if (v.outcome == Outcome::Intersect) g.levels[n].hedges.emplace_back(i, j);
        }
        sort_hedges(g.levels[n].hedges);
        prev_words = std::move(words);
    }
    return g;
}

LeveledGraph build_ladder(int depth, const std::vector<int>& rungs) {
    std::vector<std::pair<Word, Word>> edges;
    for (int p : rungs) {
        require(p >= 1, "InvalidArgument", "rung levels are positive");
        if (p > depth) continue;
        Word a(p, 1);
        Word b(p, 1);
        b.back() = 2;
        edges.emplace_back(a, b);
    }
    LeveledGraph g = build_explicit(2, depth, edges);
    g.source = GraphSource::DigitRule;
    return g;
}

LeveledGraph build_alpha_rule(const SignedTernary& expansion, int depth) {
    require(!expansion.dual, "DualExpansionNotSupported",
            "two-expansion alpha needs the union decomposition");
    require(depth >= 1, "InvalidArgument", "depth must be positive");

    LeveledGraph g;
    g.alphabet = 2;
    g.depth = depth;
    g.source = GraphSource::DigitRule;
    g.levels.resize(depth + 1);
    g.levels[0].names = {"o"};
    g.levels[1].names = {"a", "b"};
    g.levels[1].parent = {0, 0};

    const char* digit_char = "02"; // symbol s -> digit 2(s-1)
    for (int n = 2; n <= depth; ++n) {
        auto& prev = g.levels[n - 1];
        auto& cur = g.levels[n];
        for (int p = 0; p < (int)prev.names.size(); ++p)
            for (int s = 0; s < 2; ++s) {
                cur.names.push_back(prev.names[p] + digit_char[s]);
                cur.parent.push_back(p);
            }
    }

    // digits of vertex i in copy block: i expressed base 2 over {0,2}
    auto digits_of = [&](int idx, int len) {
        std::vector<int> d(len);
        for (int k = len - 1; k >= 0; --k) {
            d[k] = (idx % 2) * 2;
            idx /= 2;
        }
        return d;
    };

    for (int n = 1; n <= depth; ++n) {
        int m = n - 1;             // word length within a copy
        int block = 1 << m;        // copy block size
        if (n == 1) {
            // roots touch iff C and C+alpha intersect; with a unique expansion
            // the level-m rule below has a solution at every m, so they do.
            g.levels[1].hedges.emplace_back(0, 1);
            continue;
        }
        for (int i = 0; i < block; ++i) {
            // alpha_k = 2 forces (i_k, j_k) = (2, 0); alpha_k = 0 forces i_k = j_k
            std::vector<int> di = digits_of(i, m);
            std::vector<int> dj(m);
            bool ok = true;
            for (int k = 0; k < m; ++k) {
                int ak = expansion.digit(k + 1);
                if (ak == 2) {
                    if (di[k] != 2) { ok = false; break; }
                    dj[k] = 0;
                } else if (ak == 0) {
                    dj[k] = di[k];
                } else { // ak == -2
                    if (di[k] != 0) { ok = false; break; }
                    dj[k] = 2;
                }
            }
            if (!ok) continue;
            int j = 0;
            for (int k = 0; k < m; ++k) j = j * 2 + dj[k] / 2;
            g.levels[n].hedges.emplace_back(i, block + j);
        }
        sort_hedges(g.levels[n].hedges);
    }
    require(!g.closure_violation(), "InternalError", "alpha rule broke closure");
    return g;
}

LeveledGraph union_graphs(const std::vector<const LeveledGraph*>& parts, int depth,
                          int refine_budget) {
    require(parts.size() >= 2, "InvalidArgument", "union needs at least two parts");
    require(depth >= 1, "InvalidArgument", "depth must be positive");
    int ell = (int)parts.size();

    bool all_ifs = true;
    for (auto* p : parts) {
        require(p->depth >= depth - 1, "InvalidArgument", "part not built deep enough");
        if (!p->system) all_ifs = false;
    }
    int common_alpha = parts[0]->alphabet;
    for (auto* p : parts)
        if (p->alphabet != common_alpha) common_alpha = 0;
    require(all_ifs || common_alpha > 0, "InvalidArgument",
            "heterogeneous unions need IFS parts");

    LeveledGraph g;
    g.alphabet = common_alpha;
    g.depth = depth;
    g.source = GraphSource::Union;
    g.levels.resize(depth + 1);
    g.levels[0].names = {"o"};
    if (all_ifs)
        for (auto* p : parts) g.part_systems.push_back(p->system);

    // copy c occupies a contiguous block at every level; block offsets per level
    std::vector<std::vector<int>> offset(depth + 1, std::vector<int>(ell + 1, 0));
    for (int n = 1; n <= depth; ++n) {
        auto& cur = g.levels[n];
        for (int c = 0; c < ell; ++c) {
            offset[n][c] = (int)cur.names.size();
            const auto& part = *parts[c];
            std::string tag(1, char('a' + c));
            int pn = n - 1; // part level
            for (int i = 0; i < part.level_size(pn); ++i) {
                cur.names.push_back(pn == 0 ? tag : tag + part.levels[pn].names[i]);
                cur.parent.push_back(n == 1 ? 0 : offset[n - 1][c] + part.levels[pn].parent[i]);
            }
        }
        offset[n][ell] = (int)cur.names.size();
    }

    if (!all_ifs) {
        for (int n = 2; n <= depth; ++n) {
            for (int c = 0; c < ell; ++c)
                for (auto [a, b] : parts[c]->levels[n - 1].hedges)
                    g.levels[n].hedges.emplace_back(offset[n][c] + a, offset[n][c] + b);
            sort_hedges(g.levels[n].hedges);
        }
        return g;
    }

    // IFS path: recompute all horizontal edges (within and across copies).
    std::map<std::pair<int, int>, std::unique_ptr<CellIntersector>> oracles;
    auto oracle = [&](int ci, int cj) -> CellIntersector& {
        auto key = std::make_pair(ci, cj);
        auto it = oracles.find(key);
        if (it == oracles.end())
            it = oracles
                     .emplace(key, std::make_unique<CellIntersector>(*parts[ci]->system,
                                                                     *parts[cj]->system))
                     .first;
        return *it->second;
    };

    // per level: local (copy, word) for each vertex
    std::vector<std::pair<int, Word>> prev_words;
    for (int c = 0; c < ell; ++c) prev_words.emplace_back(c, Word{});
    for (int n = 1; n <= depth; ++n) {
        std::vector<std::pair<int, Word>> words;
        if (n == 1) {
            words = prev_words;
        } else {
            for (const auto& [c, w] : prev_words) {
                int N = parts[c]->alphabet;
                for (int s = 1; s <= N; ++s) {
                    Word cw = w;
                    cw.push_back(s);
                    words.emplace_back(c, cw);
                }
            }
        }

        std::vector<std::pair<int, int>> candidates;
        if (n == 1) {
            for (int i = 0; i < ell; ++i)
                for (int j = i + 1; j < ell; ++j) candidates.emplace_back(i, j);
        } else {
            std::vector<std::pair<int, int>> child_lo(g.level_size(n - 1));
            for (int v = 0; v < g.level_size(n - 1); ++v)
                child_lo[v] = g.children_range(n - 1, v);
            for (int v = 0; v < g.level_size(n - 1); ++v) {
                auto [lo, hi] = child_lo[v];
                for (int a = lo; a < hi; ++a)
                    for (int b = a + 1; b < hi; ++b) candidates.emplace_back(a, b);
            }
            for (auto [p, q] : g.levels[n - 1].hedges) {
                auto [plo, phi] = child_lo[p];
                auto [qlo, qhi] = child_lo[q];
                for (int a = plo; a < phi; ++a)
                    for (int b = qlo; b < qhi; ++b) candidates.emplace_back(a, b);
            }
        }
        for (auto [i, j] : candidates) {
            const auto& [ci, wi] = words[i];
            const auto& [cj, wj] = words[j];
            IntersectionVerdict v = oracle(ci, cj).query(wi, wj, refine_budget);
            if (v.outcome == Outcome::Unknown)
                fail("UndecidedIntersection",
                     "union pair (" + g.levels[n].names[i] + "," + g.levels[n].names[j] +
                         ") undecided within refinement budget");
            if (v.outcome == Outcome::Intersect) g.levels[n].hedges.emplace_back(i, j);
        }
        sort_hedges(g.levels[n].hedges);
        prev_words = std::move(words);
    }
    require(!g.closure_violation(), "InternalError", "union edges broke closure");
    return g;
}

LeveledGraph telescope(const LeveledGraph& g, int k) {
    require(k >= 1, "InvalidArgument", "telescope step must be positive");
    if (k == 1) return g;
    require(g.depth % k == 0, "InvalidArgument", "graph depth must be a multiple of k");

    LeveledGraph out;
    out.alphabet = 1;
    for (int i = 0; i < k; ++i) out.alphabet *= g.alphabet;
    out.depth = g.depth / k;
    out.source = GraphSource::Telescope;
    out.levels.resize(out.depth + 1);
    for (int m = 0; m <= out.depth; ++m) {
        int n = m * k;
        out.levels[m].names = g.levels[n].names;
        out.levels[m].hedges = g.levels[n].hedges;
        if (m == 0) continue;
        out.levels[m].parent.resize(g.level_size(n));
        for (int i = 0; i < g.level_size(n); ++i) {
            VertexRef v{n, i};
            out.levels[m].parent[i] = g.ancestor(v, n - k).index;
        }
    }
    return out;
}

LeveledGraph build_target_graph(int ell, int u, int N, int depth) {
    require(ell >= 1 && u >= 1 && N >= 2, "InvalidArgument", "bad target parameters");
    require(ell % u == 0, "DivisibilityViolation",
            "block size " + std::to_string(u) + " must divide copy count " +
                std::to_string(ell));
    require(depth >= 1, "InvalidArgument", "depth must be positive");

    LeveledGraph g;
    g.alphabet = N;
    g.depth = depth;
    g.source = GraphSource::Union;
    g.levels.resize(depth + 1);
    g.levels[0].names = {"o"};
    for (int n = 1; n <= depth; ++n) {
        auto& cur = g.levels[n];
        if (n == 1) {
            for (int c = 0; c < ell; ++c) {
                cur.names.push_back(std::string(1, char('a' + c % 26)) +
                                    (c >= 26 ? std::to_string(c / 26) : ""));
                cur.parent.push_back(0);
            }
        } else {
            auto& prev = g.levels[n - 1];
            for (int p = 0; p < (int)prev.names.size(); ++p)
                for (int s = 1; s <= N; ++s) {
                    cur.names.push_back(prev.names[p] + char('0' + s));
                    cur.parent.push_back(p);
                }
        }
        // tile the level with cliques over u consecutive vertices
        int sz = (int)cur.names.size();
        require(sz % u == 0, "InternalError", "level not tiled by blocks");
        for (int base = 0; base < sz; base += u)
            for (int a = 0; a < u; ++a)
                for (int b = a + 1; b < u; ++b)
                    cur.hedges.emplace_back(base + a, base + b);
        sort_hedges(cur.hedges);
    }
    if (auto bad = g.closure_violation())
        fail("ClosureViolation", "target blocks break closure at (" + bad->first + "," +
                                     bad->second + "); u too large for N");
    return g;
}

LeveledGraph truncate_graph(const LeveledGraph& g, int new_depth) {
    require(new_depth >= 0 && new_depth <= g.depth, "InvalidArgument", "bad truncation depth");
    LeveledGraph out = g;
    out.depth = new_depth;
    out.levels.resize(new_depth + 1);
    return out;
}

LeveledGraph component_subgraph(const LeveledGraph& g, int level,
                                const std::vector<int>& members) {
    require(level >= 0 && level <= g.depth, "InvalidArgument", "bad component level");
    LeveledGraph out;
    out.alphabet = g.alphabet;
    out.depth = g.depth - level;
    out.source = g.source;
    out.system = g.system;
    out.levels.resize(out.depth + 1);

    std::vector<int> keep = members; // sorted vertex indices at g-level `level`
    std::sort(keep.begin(), keep.end());
    for (int m = 0; m <= out.depth; ++m) {
        int n = level + m;
        std::vector<int> remap(g.level_size(n), -1);
        for (int pos = 0; pos < (int)keep.size(); ++pos) remap[keep[pos]] = pos;
        auto& cur = out.levels[m];
        for (int idx : keep) cur.names.push_back(g.levels[n].names[idx]);
        for (auto [a, b] : g.levels[n].hedges)
            if (remap[a] >= 0 && remap[b] >= 0)
                cur.hedges.emplace_back(remap[a], remap[b]);
        sort_hedges(cur.hedges);
        if (m == out.depth) break;
        // advance keep to children
        std::vector<int> next;
        for (int idx : keep) {
            auto [lo, hi] = g.children_range(n, idx);
            for (int c = lo; c < hi; ++c) next.push_back(c);
        }
        std::sort(next.begin(), next.end());
        // parents of the next level, positions within current keep
        auto& nxt = out.levels[m + 1];
        nxt.parent.reserve(next.size());
        for (int idx : next) {
            int par = g.levels[n + 1].parent[idx];
            int pos = (int)(std::lower_bound(keep.begin(), keep.end(), par) - keep.begin());
            nxt.parent.push_back(pos);
        }
        keep = std::move(next);
    }
    return out;
}

std::vector<std::vector<int>> components(const LeveledGraph& g, int level) {
    require(level >= 0 && level <= g.depth, "InvalidArgument", "level beyond depth");
    int n = g.level_size(level);
    std::vector<int> dsu(n);
    std::iota(dsu.begin(), dsu.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
        return x;
    };
    for (auto [a, b] : g.levels[level].hedges) {
        int ra = find(a), rb = find(b);
        if (ra != rb) dsu[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    out.reserve(groups.size());
    for (auto& [root, mem] : groups) out.push_back(std::move(mem)); // keyed by first member
    return out;
}

ComponentStructure analyze_components(const LeveledGraph& g) {
    ComponentStructure cs;
    cs.by_level.resize(g.depth + 1);
    cs.comp_of.resize(g.depth + 1);
    for (int n = 0; n <= g.depth; ++n) {
        auto comps = components(g, n);
        cs.comp_of[n].assign(g.level_size(n), -1);
        auto adj = g.adjacency(n);
        for (int ci = 0; ci < (int)comps.size(); ++ci) {
            ComponentStructure::Comp comp;
            comp.level = n;
            comp.members = comps[ci];
            for (int pos = 0; pos < (int)comp.members.size(); ++pos)
                cs.comp_of[n][comp.members[pos]] = ci;
            comp.adj.resize(comp.members.size());
            auto pos_of = [&](int vertex) {
                return (int)(std::lower_bound(comp.members.begin(), comp.members.end(),
                                              vertex) -
                             comp.members.begin());
            };
            for (int pos = 0; pos < (int)comp.members.size(); ++pos)
                for (int nb : adj[comp.members[pos]])
                    comp.adj[pos].push_back(pos_of(nb));
            if (n > 0) {
                int pc = -1;
                for (int pos = 0; pos < (int)comp.members.size(); ++pos) {
                    int par = g.levels[n].parent[comp.members[pos]];
                    int this_pc = cs.comp_of[n - 1][par];
                    require(pc == -1 || pc == this_pc, "ClosureViolation",
                            "component parents straddle two components");
                    pc = this_pc;
                    const auto& pmem = cs.by_level[n - 1][this_pc].members;
                    comp.parent_attach.push_back(
                        (int)(std::lower_bound(pmem.begin(), pmem.end(), par) - pmem.begin()));
                }
                comp.parent_comp = pc;
            }
            cs.by_level[n].push_back(std::move(comp));
        }
        if (n > 0)
            for (int ci = 0; ci < (int)cs.by_level[n].size(); ++ci)
                cs.by_level[n - 1][cs.by_level[n][ci].parent_comp].children.push_back(ci);
    }
    return cs;
}

GraphMetrics::GraphMetrics(const LeveledGraph& g) : g_(&g), comps_(analyze_components(g)) {
    comp_dist_.resize(g.depth + 1);
    for (int n = 0; n <= g.depth; ++n) {
        comp_dist_[n].resize(comps_.by_level[n].size());
        for (std::size_t ci = 0; ci < comps_.by_level[n].size(); ++ci) {
            const auto& comp = comps_.by_level[n][ci];
            int sz = (int)comp.members.size();
            auto& dist = comp_dist_[n][ci];
            dist.assign(sz, std::vector<int>(sz, -1));
            for (int s = 0; s < sz; ++s) {
                dist[s][s] = 0;
                std::deque<int> queue{s};
                while (!queue.empty()) {
                    int v = queue.front();
                    queue.pop_front();
                    for (int nb : comp.adj[v])
                        if (dist[s][nb] < 0) {
                            dist[s][nb] = dist[s][v] + 1;
                            queue.push_back(nb);
                        }
                }
            }
        }
    }
}

GeodesicSummary GraphMetrics::geodesic(VertexRef x, VertexRef y) const {
    int best_d = -1, best_m = 0, best_h = 0;
    int top = std::min(x.level, y.level);
    for (int m = top; m >= 0; --m) {
        VertexRef ax = g_->ancestor(x, m);
        VertexRef ay = g_->ancestor(y, m);
        int cx = comps_.comp_of[m][ax.index];
        int cy = comps_.comp_of[m][ay.index];
        if (cx != cy) continue;
        const auto& comp = comps_.by_level[m][cx];
        auto pos = [&](int vertex) {
            return (int)(std::lower_bound(comp.members.begin(), comp.members.end(), vertex) -
                         comp.members.begin());
        };
        int h = comp_dist_[m][cx][pos(ax.index)][pos(ay.index)];
        if (h < 0) continue;
        int d = (x.level - m) + (y.level - m) + h;
        if (best_d < 0 || d < best_d || (d == best_d && m < best_m)) {
            best_d = d;
            best_m = m;
            best_h = h;
        }
    }
    require(best_d >= 0, "NoPath", "vertices are not connected");
    return GeodesicSummary{best_d, best_m, best_h};
}

int GraphMetrics::gromov_product_x2(VertexRef x, VertexRef y) const {
    return x.level + y.level - distance(x, y);
}

Rational GraphMetrics::gromov_product(VertexRef x, VertexRef y) const {
    return Rational(gromov_product_x2(x, y), 2);
}

double GraphMetrics::hyperbolic_metric(VertexRef x, VertexRef y, double a) const {
    require(a > 0, "InvalidArgument", "metric parameter a must be positive");
    if (x == y) return 0.0;
    return std::exp(-a * 0.5 * gromov_product_x2(x, y));
}

std::vector<std::vector<int>> GraphMetrics::bfs_distances(VertexRef src) const {
    const LeveledGraph& g = *g_;
    std::vector<std::vector<int>> dist(g.depth + 1);
    for (int n = 0; n <= g.depth; ++n) dist[n].assign(g.level_size(n), -1);
    std::deque<VertexRef> queue{src};
    dist[src.level][src.index] = 0;
    while (!queue.empty()) {
        VertexRef v = queue.front();
        queue.pop_front();
        int d = dist[v.level][v.index];
        auto visit = [&](VertexRef w) {
            if (dist[w.level][w.index] < 0) {
                dist[w.level][w.index] = d + 1;
                queue.push_back(w);
            }
        };
        if (v.level > 0) visit(g.parent_of(v));
        if (v.level < g.depth) {
            auto [lo, hi] = g.children_range(v.level, v.index);
            for (int c = lo; c < hi; ++c) visit(VertexRef{v.level + 1, c});
        }
        for (auto [a, b] : g.levels[v.level].hedges) {
            if (a == v.index) visit(VertexRef{v.level, b});
            if (b == v.index) visit(VertexRef{v.level, a});
        }
    }
    return dist;
}

LeveledGraph quotient_tree(const LeveledGraph& g) {
    ComponentStructure cs = analyze_components(g);
    LeveledGraph q;
    q.alphabet = 0; // variable arity
    q.depth = g.depth;
    q.source = GraphSource::Quotient;
    q.levels.resize(g.depth + 1);
    for (int n = 0; n <= g.depth; ++n) {
        for (const auto& comp : cs.by_level[n]) {
            std::string nm;
            if (comp.members.size() == 1) {
                nm = g.levels[n].names[comp.members[0]];
            } else {
                nm = "{";
                for (std::size_t i = 0; i < comp.members.size(); ++i) {
                    if (i) nm += ",";
                    nm += g.levels[n].names[comp.members[i]];
                }
                nm += "}";
            }
            q.levels[n].names.push_back(nm);
            if (n > 0) q.levels[n].parent.push_back(comp.parent_comp);
        }
    }
    return q;
}

SandwichResult gromov_sandwich_check(const LeveledGraph& g, int depth) {
    require(depth >= 1 && depth <= g.depth, "InvalidArgument", "bad check depth");
    GraphMetrics mg(g);
    LeveledGraph q = quotient_tree(g);
    GraphMetrics mq(q);

    SandwichResult res;
    for (int n = 0; n <= depth; ++n)
        for (const auto& comp : mg.comps().by_level[n])
            res.k = std::max(res.k, (int)comp.members.size());

    std::vector<VertexRef> verts;
    for (int n = 0; n <= depth; ++n)
        for (int i = 0; i < g.level_size(n); ++i) verts.push_back({n, i});
    std::int64_t v = (std::int64_t)verts.size();
    std::int64_t total = v * (v + 1) / 2;

    std::vector<int> worst(256, 0);
    std::vector<char> ok(256, 1);
    int chunks = parallel_chunks(total, [&](std::int64_t lo, std::int64_t hi, int chunk) {
        int local_worst = 0;
        bool local_ok = true;
        for (std::int64_t t = lo; t < hi; ++t) {
            // unrank the (i ≤ j) pair
            std::int64_t i = (std::int64_t)((std::sqrt(8.0 * (double)t + 1) - 1) / 2);
            while ((i + 1) * (i + 2) / 2 <= t) ++i;
            while (i * (i + 1) / 2 > t) --i;
            std::int64_t j = t - i * (i + 1) / 2;
            VertexRef x = verts[(std::size_t)i], y = verts[(std::size_t)j];
            int gx2 = mg.gromov_product_x2(x, y);
            VertexRef qx{x.level, mg.comps().comp_of[x.level][x.index]};
            VertexRef qy{y.level, mg.comps().comp_of[y.level][y.index]};
            int qx2 = mq.gromov_product_x2(qx, qy);
            int defect = qx2 - gx2;
            if (defect < 0 || defect > 2 * res.k) local_ok = false;
            if (defect > local_worst) local_worst = defect;
        }
        worst[chunk] = local_worst;
        ok[chunk] = local_ok ? 1 : 0;
    });
    res.holds = true;
    for (int c = 0; c < chunks; ++c) {
        res.holds = res.holds && ok[c];
        res.max_defect_x2 = std::max(res.max_defect_x2, worst[c]);
    }
    return res;
}

HyperbolicityWitness hyperbolicity_witness(const LeveledGraph& g, long long pair_threshold) {
    GraphMetrics m(g);
    std::vector<VertexRef> verts;
    for (int n = 0; n <= g.depth; ++n)
        for (int i = 0; i < g.level_size(n); ++i) verts.push_back({n, i});
    long long v = (long long)verts.size();

    HyperbolicityWitness w;
    w.sampled = v * v > pair_threshold;

    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    };

    if (!w.sampled) {
        std::vector<std::vector<int>> gp((std::size_t)v, std::vector<int>(v));
        for (long long i = 0; i < v; ++i)
            for (long long j = i; j < v; ++j) {
                GeodesicSummary s = m.geodesic(verts[i], verts[j]);
                w.max_horizontal_part = std::max(w.max_horizontal_part, s.horizontal_length);
                int p = verts[i].level + verts[j].level - s.distance;
                gp[i][j] = gp[j][i] = p;
            }
        for (long long x = 0; x < v; ++x)
            for (long long y = x; y < v; ++y) {
                int gxy = gp[x][y];
                for (long long z = 0; z < v; ++z) {
                    int lhs = std::min(gp[x][z], gp[z][y]) - gxy;
                    if (lhs > w.delta_x2) w.delta_x2 = lhs;
                }
            }
        return w;
    }

    const long long samples = 200000;
    for (long long s = 0; s < samples; ++s) {
        std::uint64_t h1 = mix((std::uint64_t)s * 3 + 0);
        std::uint64_t h2 = mix((std::uint64_t)s * 3 + 1);
        std::uint64_t h3 = mix((std::uint64_t)s * 3 + 2);
        VertexRef x = verts[(std::size_t)(h1 % (std::uint64_t)v)];
        VertexRef y = verts[(std::size_t)(h2 % (std::uint64_t)v)];
        VertexRef z = verts[(std::size_t)(h3 % (std::uint64_t)v)];
        GeodesicSummary sxy = m.geodesic(x, y);
        w.max_horizontal_part = std::max(w.max_horizontal_part, sxy.horizontal_length);
        int gxy = x.level + y.level - sxy.distance;
        int gxz = m.gromov_product_x2(x, z);
        int gzy = m.gromov_product_x2(z, y);
        int lhs = std::min(gxz, gzy) - gxy;
        if (lhs > w.delta_x2) w.delta_x2 = lhs;
    }
    return w;
}

std::string export_dot(const LeveledGraph& g, int level_lo, int level_hi) {
    if (level_hi < 0) level_hi = g.depth;
    require(level_lo >= 0 && level_lo <= level_hi && level_hi <= g.depth, "InvalidArgument",
            "bad level range");
    std::ostringstream out;
    out << "digraph augtree {\n";
    out << "  rankdir=TB;\n";
    for (int n = level_lo; n <= level_hi; ++n)
        for (const auto& nm : g.levels[n].names) out << "  \"" << nm << "\";\n";
    for (int n = level_lo + 1; n <= level_hi; ++n)
        for (int i = 0; i < g.level_size(n); ++i)
            out << "  \"" << g.levels[n - 1].names[g.levels[n].parent[i]] << "\" -> \""
                << g.levels[n].names[i] << "\";\n";
    for (int n = level_lo; n <= level_hi; ++n)
        for (auto [a, b] : g.levels[n].hedges)
            out << "  \"" << g.levels[n].names[a] << "\" -> \"" << g.levels[n].names[b]
                << "\" [dir=none, constraint=false];\n";
    out << "}\n";
    return out.str();
}

LeveledGraph import_dot(const std::string& text) {
    // Accepts the emitter's dialect: quoted names, '->' edges, horizontal
    // edges are marked dir=none.
    std::vector<std::pair<std::string, std::string>> vertical, horizontal;
    std::set<std::string> declared;
    std::istringstream in(text);
    std::string line;
    auto quoted = [](const std::string& s, std::size_t from, std::string& out,
                     std::size_t& next) {
        auto a = s.find('"', from);
        if (a == std::string::npos) return false;
        auto b = s.find('"', a + 1);
        if (b == std::string::npos) return false;
        out = s.substr(a + 1, b - a - 1);
        next = b + 1;
        return true;
    };
    while (std::getline(in, line)) {
        std::string first, second;
        std::size_t pos = 0;
        if (!quoted(line, 0, first, pos)) continue;
        if (line.find("->", pos) != std::string::npos && quoted(line, pos, second, pos)) {
            if (line.find("dir=none", pos) != std::string::npos)
                horizontal.emplace_back(first, second);
            else
                vertical.emplace_back(first, second);
        } else {
            declared.insert(first);
        }
    }
    require(declared.count("o"), "ParseError", "DOT import needs a root named \"o\"");

    std::map<std::string, int> level_of{{"o", 0}};
    std::map<std::string, std::string> parent_name;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [p, c] : vertical) {
            auto it = level_of.find(p);
            if (it == level_of.end()) continue;
            if (!level_of.count(c)) {
                level_of[c] = it->second + 1;
                parent_name[c] = p;
                changed = true;
            }
        }
    }
    int depth = 0;
    for (auto& [nm, lv] : level_of) depth = std::max(depth, lv);

    LeveledGraph g;
    g.depth = depth;
    g.source = GraphSource::ExplicitRule;
    g.levels.resize(depth + 1);
    std::vector<std::vector<std::string>> by_level(depth + 1);
    for (auto& [nm, lv] : level_of) by_level[lv].push_back(nm);
    for (auto& names : by_level) std::sort(names.begin(), names.end());
    std::map<std::string, int> index_of;
    for (int n = 0; n <= depth; ++n) {
        g.levels[n].names = by_level[n];
        for (int i = 0; i < (int)by_level[n].size(); ++i) index_of[by_level[n][i]] = i;
        if (n > 0)
            for (const auto& nm : by_level[n])
                g.levels[n].parent.push_back(index_of.at(parent_name.at(nm)));
        // index_of keyed per level is safe because names repeat only across levels
        for (auto& [a, b] : horizontal)
            if (level_of.count(a) && level_of.at(a) == n && level_of.count(b) &&
                level_of.at(b) == n)
                g.levels[n].hedges.emplace_back(index_of.at(a), index_of.at(b));
        sort_hedges(g.levels[n].hedges);
    }
    int fanout = 0;
    for (int n = 0; n < depth; ++n)
        for (int i = 0; i < g.level_size(n); ++i) {
            auto [lo, hi] = g.children_range(n, i);
            fanout = std::max(fanout, hi - lo);
        }
    g.alphabet = fanout;
    if (auto bad = g.closure_violation())
        fail("ClosureViolation",
             "imported edges violate closure at (" + bad->first + "," + bad->second + ")");
    return g;
}

} // namespace hyperlip
