#include "hyperlip/neariso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <set>

#include "hyperlip/parallel.hpp"
#include "hyperlip/rearrange.hpp"

namespace hyperlip {

TargetY build_target(int ell, int u, int N, int depth) {
    TargetY y;
    y.copies = ell;
    y.block = u;
    y.graph = build_target_graph(ell, u, N, depth);
    return y;
}

namespace {

// Shared level sweep: assigns each horizontal component a sorted slot tuple
// in the target, grouping same-block offspring by the class's rearranging
// matrix and filling later-block offspring into the leftover slots.
//
// `off` is the target level of the domain's root level. Slot indices are the
// target vertex indices; children of slot s are s*N .. s*N+N-1.
struct Sweep {
    const LeveledGraph& g;
    const ClassificationReport& rep;
    const ComponentStructure& cs;
    int off;

    int m;                                    // class count
    std::vector<int> blk_of;                  // SCC block of each class
    std::vector<long long> ug;                // gcd of u over classes reachable from c
    std::vector<std::vector<int>> same_block; // classes sharing c's block, ascending
    std::vector<std::vector<std::vector<long long>>> cmat; // per class: p x |same_block|

    std::vector<std::vector<std::vector<int>>> comp_slots; // per level/comp
    SigmaMap* out;

    Sweep(const LeveledGraph& graph, const ClassificationReport& report,
          const ComponentStructure& comps, int offset, SigmaMap* sigma)
        : g(graph), rep(report), cs(comps), off(offset), out(sigma) {
        m = (int)rep.sizes.size();
        prepare_classes();
        comp_slots.resize(g.depth + 1);
        for (int n = 0; n <= g.depth; ++n) comp_slots[n].resize(cs.by_level[n].size());
    }

    void prepare_classes() {
        FrobeniusForm form = frobenius_form(rep.incidence);
        blk_of.assign(m, -1);
        for (int b = 0; b < (int)form.blocks.size(); ++b)
            for (int c : form.blocks[b]) blk_of[c] = b;

        // reachability in the class digraph
        std::vector<std::vector<int>> adj(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (rep.incidence[i][j] > 0) adj[i].push_back(j);
        ug.assign(m, 0);
        same_block.assign(m, {});
        cmat.assign(m, {});
        for (int c = 0; c < m; ++c) {
            std::vector<char> seen(m, 0);
            std::deque<int> queue{c};
            seen[c] = 1;
            long long gcd_u = 0;
            while (!queue.empty()) {
                int v = queue.front();
                queue.pop_front();
                gcd_u = std::gcd(gcd_u, rep.sizes[v]);
                for (int w : adj[v])
                    if (!seen[w]) {
                        seen[w] = 1;
                        queue.push_back(w);
                    }
            }
            ug[c] = gcd_u;
            for (int j = 0; j < m; ++j)
                if (blk_of[j] == blk_of[c]) same_block[c].push_back(j);

            // quasi matrix for the row restricted to same-block columns;
            // forced strict whenever the block is terminal
            RearrangeInstance inst;
            for (int j : same_block[c]) {
                inst.a.push_back(rep.incidence[c][j]);
                inst.u.push_back(rep.sizes[j]);
            }
            inst.target = BigInt(ug[c]) * rep.alphabet;
            inst.p = rep.sizes[c] / ug[c];
            auto C = solve_quasi(inst);
            require(C.has_value(), "QuasiRearrangeFailed",
                    "class row admits no quasi-rearrangement at k=1");
            for (const auto& row : C->rows) {
                std::vector<long long> r;
                for (const auto& x : row) r.push_back((long long)x);
                cmat[c].push_back(std::move(r));
            }
        }
    }

    void place(int level, int comp_index, std::vector<int> slots) {
        const auto& comp = cs.by_level[level][comp_index];
        require(slots.size() == comp.members.size(), "CapacityViolation",
                "slot tuple does not match component size");
        std::sort(slots.begin(), slots.end());
        for (std::size_t i = 0; i < comp.members.size(); ++i)
            out->map[level][comp.members[i]] = {level + off, slots[i]};
        comp_slots[level][comp_index] = std::move(slots);
    }

    void run() {
        // root level: either the single root or the component T itself
        {
            std::vector<int> init(g.level_size(0));
            std::iota(init.begin(), init.end(), 0);
            require(cs.by_level[0].size() == 1, "InvalidArgument",
                    "root level must be a single component");
            place(0, 0, std::move(init));
        }
        for (int n = 0; n < g.depth; ++n)
            for (int ci = 0; ci < (int)cs.by_level[n].size(); ++ci) assign_children(n, ci);
    }

    void assign_children(int n, int ci) {
        const auto& comp = cs.by_level[n][ci];
        if (comp.children.empty()) return;
        const auto& slots = comp_slots[n][ci];
        int c = rep.class_of_component[n][ci];

        if (c < 0) {
            // unclassified root: scatter everything in component order
            std::deque<int> pool;
            for (int s : slots)
                for (int b = 0; b < rep.alphabet; ++b) pool.push_back(s * rep.alphabet + b);
            for (int child_ci : comp.children) {
                const auto& child = cs.by_level[n + 1][child_ci];
                std::vector<int> take;
                for (std::size_t i = 0; i < child.members.size(); ++i) {
                    require(!pool.empty(), "CapacityViolation", "slot pool exhausted");
                    take.push_back(pool.front());
                    pool.pop_front();
                }
                place(n + 1, child_ci, std::move(take));
            }
            require(pool.empty(), "CapacityViolation", "unused slots below the root");
            return;
        }

        long long u = ug[c];
        long long p = rep.sizes[c] / u;
        require((long long)slots.size() == p * u, "InternalError", "slot count mismatch");

        // group pools: children slots of u consecutive assigned slots
        std::vector<std::deque<int>> pools(p);
        for (long long gi = 0; gi < p; ++gi)
            for (long long s = gi * u; s < (gi + 1) * u; ++s)
                for (int b = 0; b < rep.alphabet; ++b)
                    pools[gi].push_back(slots[s] * rep.alphabet + b);

        // queues of children per class, in component (lexicographic) order
        std::vector<std::deque<int>> by_class(m);
        for (int child_ci : comp.children)
            by_class[rep.class_of_component[n + 1][child_ci]].push_back(child_ci);

        const auto& sb = same_block[c];
        for (long long gi = 0; gi < p; ++gi) {
            for (std::size_t jj = 0; jj < sb.size(); ++jj) {
                long long count = cmat[c][gi][jj];
                int j = sb[jj];
                for (long long rep_i = 0; rep_i < count; ++rep_i) {
                    require(!by_class[j].empty(), "CapacityViolation",
                            "rearranging matrix expects more offspring than present");
                    int child_ci = by_class[j].front();
                    by_class[j].pop_front();
                    std::vector<int> take;
                    for (long long i = 0; i < rep.sizes[j]; ++i) {
                        require(!pools[gi].empty(), "CapacityViolation", "group pool exhausted");
                        take.push_back(pools[gi].front());
                        pools[gi].pop_front();
                    }
                    place(n + 1, child_ci, std::move(take));
                }
            }
        }
        for (int j : sb)
            require(by_class[j].empty(), "CapacityViolation",
                    "same-block offspring left unplaced");

        // leftovers take the later-block components in lexicographic order
        std::deque<int> leftovers;
        for (auto& pool : pools)
            for (int s : pool) leftovers.push_back(s);
        for (int child_ci : comp.children) {
            int j = rep.class_of_component[n + 1][child_ci];
            if (std::find(sb.begin(), sb.end(), j) != sb.end()) continue;
            std::vector<int> take;
            for (long long i = 0; i < rep.sizes[j]; ++i) {
                require(!leftovers.empty(), "CapacityViolation", "leftover slots exhausted");
                take.push_back(leftovers.front());
                leftovers.pop_front();
            }
            place(n + 1, child_ci, std::move(take));
        }
        require(leftovers.empty(), "CapacityViolation", "unused slots after placement");
    }
};

SigmaMap run_sweep(const LeveledGraph& domain, const ClassificationReport& rep,
                   LeveledGraph target, int off, long long k_exponent) {
    SigmaMap sigma;
    sigma.domain = domain;
    sigma.target = std::move(target);
    sigma.k_exponent = k_exponent;
    sigma.map.resize(domain.depth + 1);
    for (int n = 0; n <= domain.depth; ++n)
        sigma.map[n].assign(domain.level_size(n), {-1, -1});

    ComponentStructure cs = analyze_components(domain);
    Sweep sweep(domain, rep, cs, off, &sigma);
    sweep.run();

    // target vertices never hit (root stub and anything beyond the mapped
    // range) are the target-side exceptions
    std::vector<std::vector<char>> hit(sigma.target.depth + 1);
    for (int n = 0; n <= sigma.target.depth; ++n)
        hit[n].assign(sigma.target.level_size(n), 0);
    for (int n = 0; n <= domain.depth; ++n)
        for (auto [tl, ti] : sigma.map[n])
            if (tl >= 0) {
                require(!hit[tl][ti], "InternalError", "target slot hit twice");
                hit[tl][ti] = 1;
            }
    for (int n = 0; n <= sigma.target.depth; ++n)
        for (int i = 0; i < sigma.target.level_size(n); ++i)
            if (!hit[n][i]) sigma.exceptions_target.push_back(sigma.target.levels[n].names[i]);
    return sigma;
}

} // namespace

SigmaMap sigma_primitive(const LeveledGraph& g, int level, const std::vector<int>& members,
                         int depth, long long k_budget) {
    require(depth <= g.depth, "InvalidArgument", "depth beyond built graph");
    LeveledGraph sub = component_subgraph(g, level, members);
    sub = truncate_graph(sub, depth - level);
    int budget = sub.depth - 2;
    require(budget >= 1, "InsufficientDepth", "subgraph too shallow to classify");
    ClassificationReport rep = classify_rooted(sub, budget);
    require(rep.verdict == Verdict::Simple, "NotSimple", "subgraph classification inconclusive");
    require(is_primitive(rep.incidence), "NotPrimitive",
            "subgraph incidence matrix is not primitive");

    auto pr = power_rearrange(rep.incidence, rep.sizes, rep.alphabet, k_budget);
    require(pr.has_value(), "RearrangeFailed", "no power of the incidence matrix rearranges");
    long long k = pr->k;
    if (k > 1) {
        int usable = (int)(sub.depth / k) * (int)k;
        require(usable >= (int)k * 3, "InsufficientDepth", "too shallow for telescoping");
        sub = telescope(truncate_graph(sub, usable), (int)k);
        rep = classify_rooted(sub, sub.depth - 2);
        require(rep.verdict == Verdict::Simple, "NotSimple",
                "telescoped subgraph classification inconclusive");
    }

    long long u = 0;
    for (long long s : rep.sizes) u = std::gcd(u, s);
    int ell = (int)members.size();
    require(ell % u == 0, "DivisibilityViolation", "gcd(u) does not divide the component size");

    LeveledGraph target = build_target_graph(ell, (int)u, rep.alphabet, sub.depth + 1);
    return run_sweep(sub, rep, std::move(target), 1, k);
}

SigmaMap sigma_general(const LeveledGraph& g, const ClassificationReport& report, int depth) {
    require(report.verdict == Verdict::Simple, "NotSimple",
            "near-isometry needs a simple classification");
    require(depth <= g.depth, "InvalidArgument", "depth beyond built graph");
    require(g.level_size(0) == 1, "InvalidArgument", "whole-graph map needs a single root");

    auto [ell, form] = lemma41_exponent(report.incidence);
    LeveledGraph domain = truncate_graph(g, depth);
    ClassificationReport rep = report;
    long long k_exp = 1;
    if (ell > 1) {
        int usable = (int)(depth / ell) * (int)ell;
        require(usable >= (int)ell * 3, "InsufficientDepth", "too shallow for telescoping");
        domain = telescope(truncate_graph(g, usable), (int)ell);
        rep = classify(domain, domain.depth - 2);
        require(rep.verdict == Verdict::Simple, "NotSimple",
                "telescoped classification inconclusive");
        k_exp = ell;
    } else if (depth < g.depth) {
        rep = classify(domain, domain.depth - 2);
        require(rep.verdict == Verdict::Simple, "NotSimple", "classification inconclusive");
    }

    LeveledGraph target = build_explicit(rep.alphabet, domain.depth, {});
    return run_sweep(domain, rep, std::move(target), 0, k_exp);
}

SigmaMap sigma_union(const LeveledGraph& union_graph) {
    require(union_graph.depth >= 2, "InvalidArgument", "union graph too shallow");
    int ell = union_graph.level_size(1);
    int N = union_graph.alphabet;
    require(N >= 2, "InvalidArgument", "union parts must be N-ary");
    for (int n = 0; n <= union_graph.depth; ++n)
        require(union_graph.levels[n].hedges.empty(), "InvalidArgument",
                "tree-to-union map needs plain parts");

    int D = union_graph.depth;
    SigmaMap sigma;
    sigma.domain = build_explicit(N, D - 1, {});
    sigma.target = union_graph;
    sigma.map.resize(sigma.domain.depth + 1);
    for (int n = 0; n <= sigma.domain.depth; ++n)
        sigma.map[n].assign(sigma.domain.level_size(n), {-1, -1});
    sigma.exceptions_domain.push_back("o");

    // target index of (copy c, word w): copies tile each level contiguously
    auto target_index = [&](int copy, const Word& w) {
        int level = 1 + (int)w.size();
        long long block = 1;
        for (std::size_t i = 0; i < w.size(); ++i) block *= N;
        long long idx = (long long)copy * block;
        long long within = 0;
        for (int sym : w) within = within * N + (sym - 1);
        return std::pair<int, int>{level, (int)(idx + within)};
    };

    // enumeration of I = {1..N-1, N1..N(N-1), ...}: s = q(N-1) + a
    auto i_word = [&](long long s) {
        long long q = (s - 1) / (N - 1);
        int a = (int)((s - 1) % (N - 1)) + 1;
        Word w(q, N);
        w.push_back(a);
        return w;
    };

    for (int n = 1; n <= sigma.domain.depth; ++n) {
        for (int i = 0; i < sigma.domain.level_size(n); ++i) {
            Word w = name_to_word(sigma.domain.levels[n].names[i], N);
            std::size_t q = 0;
            while (q < w.size() && w[q] == N) ++q;
            std::pair<int, int> img;
            if (q == w.size()) {
                // sigma(N^{q}) = o_ell N^{q-1}
                Word tail(q - 1, N);
                img = target_index(ell - 1, tail);
            } else {
                long long s = (long long)q * (N - 1) + w[q];
                Word tail(w.begin() + q + 1, w.end());
                if (s <= ell - 1) {
                    img = target_index((int)s - 1, tail);
                } else {
                    Word js = i_word(s - (ell - 1));
                    js.insert(js.end(), tail.begin(), tail.end());
                    img = target_index(ell - 1, js);
                }
            }
            require(img.first <= sigma.target.depth, "InternalError", "image beyond target");
            sigma.map[n][i] = img;
        }
    }

    std::set<std::pair<int, int>> hit;
    for (int n = 0; n <= sigma.domain.depth; ++n)
        for (auto im : sigma.map[n])
            if (im.first >= 0)
                require(hit.insert(im).second, "InternalError", "union map not injective");
    sigma.exceptions_target.push_back("o");
    return sigma;
}

int verify_distortion(SigmaMap& sigma, int depth, long long pair_budget) {
    require(depth <= sigma.domain.depth, "InvalidArgument", "depth beyond domain");
    GraphMetrics dm(sigma.domain);
    GraphMetrics tm(sigma.target);

    std::vector<VertexRef> verts;
    for (int n = 0; n <= depth; ++n)
        for (int i = 0; i < sigma.domain.level_size(n); ++i)
            if (sigma.map[n][i].first >= 0) verts.push_back({n, i});

    std::int64_t v = (std::int64_t)verts.size();
    std::int64_t total = v * (v + 1) / 2;
    bool exhaustive = total <= pair_budget;

    auto diff_of = [&](VertexRef x, VertexRef y) {
        auto [xl, xi] = sigma.map[x.level][x.index];
        auto [yl, yi] = sigma.map[y.level][y.index];
        int dd = dm.distance(x, y);
        int dt = tm.distance(VertexRef{xl, xi}, VertexRef{yl, yi});
        return dd > dt ? dd - dt : dt - dd;
    };

    std::vector<int> worst(256, 0);
    int measured = 0;
    if (exhaustive) {
        int chunks = parallel_chunks(total, [&](std::int64_t lo, std::int64_t hi, int chunk) {
            int local = 0;
            for (std::int64_t t = lo; t < hi; ++t) {
                std::int64_t i = (std::int64_t)((std::sqrt(8.0 * (double)t + 1) - 1) / 2);
                while ((i + 1) * (i + 2) / 2 <= t) ++i;
                while (i * (i + 1) / 2 > t) --i;
                std::int64_t j = t - i * (i + 1) / 2;
                local = std::max(local, diff_of(verts[(std::size_t)i], verts[(std::size_t)j]));
            }
            worst[chunk] = local;
        });
        for (int c = 0; c < chunks; ++c) measured = std::max(measured, worst[c]);
    } else {
        auto mix = [](std::uint64_t x) {
            x += 0x9e3779b97f4a7c15ull;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
            return x ^ (x >> 31);
        };
        for (long long s = 0; s < pair_budget; ++s) {
            VertexRef x = verts[(std::size_t)(mix(2 * s) % (std::uint64_t)v)];
            VertexRef y = verts[(std::size_t)(mix(2 * s + 1) % (std::uint64_t)v)];
            measured = std::max(measured, diff_of(x, y));
        }
    }

    sigma.measured_distortion = std::max(sigma.measured_distortion, measured);
    sigma.exhaustive = exhaustive;
    sigma.depths_checked.push_back(depth);
    return measured;
}

} // namespace hyperlip
