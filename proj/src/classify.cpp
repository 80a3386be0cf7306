#include "hyperlip/classify.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace hyperlip {

namespace {

// Canonical-form machinery: signatures of depth-truncated component
// subtrees, computed by exhaustive labeling. sig_t(S) = sig_t(S') iff the
// t-level truncations of S_D and S'_D are isomorphic as layered graphs.
struct Classifier {
    const LeveledGraph& g;
    const ComponentStructure& cs;
    int cap;

    // flat component ids
    std::vector<std::pair<int, int>> flat; // (level, comp index)
    std::vector<std::vector<int>> id_of;   // per level: comp index -> flat id

    // per flat id
    std::vector<int> sig0;
    std::vector<std::vector<std::vector<int>>> labels0; // adjacency-canonical perms
    std::vector<std::vector<int>> sig_by_t;             // sig_by_t[t][id], -1 = undefined
    std::vector<std::vector<std::vector<int>>> labels_cur;

    std::map<std::vector<int>, int> intern;

    int intern_tokens(const std::vector<int>& tokens) {
        auto [it, inserted] = intern.try_emplace(tokens, (int)intern.size());
        return it->second;
    }

    explicit Classifier(const LeveledGraph& graph, const ComponentStructure& comps, int cap_)
        : g(graph), cs(comps), cap(cap_) {
        id_of.resize(g.depth + 1);
        for (int n = 0; n <= g.depth; ++n) {
            id_of[n].resize(cs.by_level[n].size());
            for (int c = 0; c < (int)cs.by_level[n].size(); ++c) {
                id_of[n][c] = (int)flat.size();
                flat.emplace_back(n, c);
            }
        }
    }

    const ComponentStructure::Comp& comp(int id) const {
        auto [n, c] = flat[id];
        return cs.by_level[n][c];
    }

    void compute_sig0() {
        sig0.resize(flat.size());
        labels0.resize(flat.size());
        for (int id = 0; id < (int)flat.size(); ++id) {
            const auto& c = comp(id);
            int sz = (int)c.members.size();
            require(sz <= cap, "CapExceeded",
                    "component of size " + std::to_string(sz) + " exceeds cap " +
                        std::to_string(cap));
            std::vector<int> perm(sz);
            std::iota(perm.begin(), perm.end(), 0);
            std::vector<int> best;
            std::vector<std::vector<int>> argmin;
            do {
                std::vector<std::pair<int, int>> edges;
                for (int i = 0; i < sz; ++i)
                    for (int j : c.adj[i])
                        if (i < j) edges.emplace_back(std::minmax(perm[i], perm[j]));
                std::sort(edges.begin(), edges.end());
                std::vector<int> tokens{sz};
                for (auto [a, b] : edges) {
                    tokens.push_back(a);
                    tokens.push_back(b);
                }
                if (best.empty() || tokens < best) {
                    best = tokens;
                    argmin.clear();
                    argmin.push_back(perm);
                } else if (tokens == best) {
                    argmin.push_back(perm);
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            sig0[id] = intern_tokens(best);
            labels0[id] = std::move(argmin);
        }
        sig_by_t.push_back(sig0);
        labels_cur = labels0;
    }

    // canonical attachment of child under the parent labeling
    std::vector<int> attachment(int child_id, const std::vector<int>& parent_perm) const {
        const auto& c = comp(child_id);
        int sz = (int)c.members.size();
        std::vector<int> best;
        for (const auto& q : labels_cur[child_id]) {
            std::vector<int> att(sz);
            for (int i = 0; i < sz; ++i) att[q[i]] = parent_perm[c.parent_attach[i]];
            if (best.empty() || att < best) best = std::move(att);
        }
        return best;
    }

    // one refinement round; extends sig_by_t with sigs defined for components
    // whose subtree reaches depth t below them
    void refine_round() {
        int t = (int)sig_by_t.size() - 1; // current deepest
        const auto& sig_t = sig_by_t[t];
        std::vector<int> next(flat.size(), -1);
        std::vector<std::vector<std::vector<int>>> next_labels(flat.size());
        for (int id = 0; id < (int)flat.size(); ++id) {
            auto [n, ci] = flat[id];
            if (n + t + 1 > g.depth) continue;
            const auto& c = comp(id);
            std::vector<int> best;
            std::vector<std::vector<int>> argmin;
            for (const auto& p : labels0[id]) {
                std::vector<std::vector<int>> descs;
                for (int child_ci : c.children) {
                    int child_id = id_of[n + 1][child_ci];
                    std::vector<int> d{sig_t[child_id]};
                    require(d[0] >= 0, "InternalError", "child signature missing");
                    std::vector<int> att = attachment(child_id, p);
                    d.insert(d.end(), att.begin(), att.end());
                    descs.push_back(std::move(d));
                }
                std::sort(descs.begin(), descs.end());
                std::vector<int> tokens{sig0[id]};
                for (const auto& d : descs) {
                    tokens.push_back(-1);
                    tokens.insert(tokens.end(), d.begin(), d.end());
                }
                if (best.empty() || tokens < best) {
                    best = tokens;
                    argmin.clear();
                    argmin.push_back(p);
                } else if (tokens == best) {
                    argmin.push_back(p);
                }
            }
            next[id] = intern_tokens(best);
            next_labels[id] = std::move(argmin);
        }
        sig_by_t.push_back(std::move(next));
        labels_cur = std::move(next_labels);
    }
};

ClassificationReport classify_core(const LeveledGraph& g, int first_level, int budget, int cap) {
    require(budget >= 1, "InvalidArgument", "budget must be positive");
    require(g.depth >= budget + 2, "InsufficientDepth",
            "graph depth " + std::to_string(g.depth) + " below budget+2 = " +
                std::to_string(budget + 2));
    require(g.alphabet >= 2, "InvalidArgument", "classification needs an N-ary graph");

    ComponentStructure cs = analyze_components(g);
    Classifier cl(g, cs, cap);
    cl.compute_sig0();
    int t_max = g.depth - budget;
    for (int t = 1; t <= t_max; ++t) cl.refine_round();

    // universe = components at levels first_level..budget
    std::vector<int> universe;
    for (int n = first_level; n <= budget; ++n)
        for (int c = 0; c < (int)cs.by_level[n].size(); ++c) universe.push_back(cl.id_of[n][c]);

    auto stable_at = [&](int t) {
        // every sig_t block maps to a single sig_{t+1} value
        std::map<int, int> fine_of;
        for (int id : universe) {
            int coarse = cl.sig_by_t[t][id];
            int fine = cl.sig_by_t[t + 1][id];
            auto [it, inserted] = fine_of.try_emplace(coarse, fine);
            if (!inserted && it->second != fine) return false;
        }
        return true;
    };

    ClassificationReport rep;
    rep.budget = budget;
    rep.alphabet = g.alphabet;

    int t_star = -1;
    std::map<int, int> class_of_sig;
    for (int t = 0; t + 1 <= t_max; ++t) {
        if (!stable_at(t)) continue;
        // classes in first-occurrence order
        std::map<int, int> trial;
        std::vector<int> reps;
        for (int id : universe) {
            int s = cl.sig_by_t[t][id];
            if (trial.try_emplace(s, (int)trial.size()).second) reps.push_back(id);
        }
        // offspring closure: every child of a universe component has a class
        bool closed = true;
        for (int id : universe) {
            auto [n, ci] = cl.flat[id];
            for (int child_ci : cs.by_level[n][ci].children) {
                int child_id = cl.id_of[n + 1][child_ci];
                if (!trial.count(cl.sig_by_t[t][child_id])) {
                    closed = false;
                    break;
                }
            }
            if (!closed) break;
        }
        if (!closed) continue;
        t_star = t;
        class_of_sig = std::move(trial);
        for (int id : reps) {
            auto [n, ci] = cl.flat[id];
            ClassInfo info;
            info.level = n;
            for (int v : cs.by_level[n][ci].members)
                info.representative.push_back(g.levels[n].names[v]);
            info.size = (long long)cs.by_level[n][ci].members.size();
            rep.classes.push_back(std::move(info));
            rep.sizes.push_back((long long)cs.by_level[n][ci].members.size());
        }
        break;
    }

    if (t_star < 0) {
        rep.verdict = Verdict::Inconclusive;
        rep.stabilization_depth = -1;
        // report the finest computed partition for diagnostics
        std::map<int, int> blocks;
        for (int id : universe) {
            int s = cl.sig_by_t[t_max][id];
            if (blocks.try_emplace(s, (int)blocks.size()).second) {
                auto [n, ci] = cl.flat[id];
                ClassInfo info;
                info.level = n;
                for (int v : cs.by_level[n][ci].members)
                    info.representative.push_back(g.levels[n].names[v]);
                info.size = (long long)cs.by_level[n][ci].members.size();
                rep.sizes.push_back(info.size);
                rep.classes.push_back(std::move(info));
            }
        }
        return rep;
    }

    rep.verdict = Verdict::Simple;
    rep.stabilization_depth = t_star;

    int m = (int)rep.classes.size();
    rep.incidence.assign(m, IntVec(m, 0));

    std::vector<int> rep_id_of_class(m, -1);
    for (int id : universe) {
        int c = class_of_sig.at(cl.sig_by_t[t_star][id]);
        if (rep_id_of_class[c] < 0) rep_id_of_class[c] = id;
    }

    rep.class_of_component.assign(g.depth + 1, {});
    for (int n = 0; n <= g.depth; ++n)
        rep.class_of_component[n].assign(cs.by_level[n].size(), -1);

    // levels within signature reach first: budget+1 is covered because
    // t_star ≤ depth - budget - 1, and closure guarantees membership
    int direct_limit = std::min(budget + 1, g.depth);
    for (int n = first_level; n <= direct_limit; ++n)
        for (int ci = 0; ci < (int)cs.by_level[n].size(); ++ci) {
            int id = cl.id_of[n][ci];
            auto it = class_of_sig.find(cl.sig_by_t[t_star][id]);
            require(it != class_of_sig.end(), "InternalError",
                    "closed partition misses a shallow component");
            rep.class_of_component[n][ci] = it->second;
        }

    // incidence from the representatives (children stay within reach)
    for (int c = 0; c < m; ++c) {
        int id = rep_id_of_class[c];
        auto [n, ci] = cl.flat[id];
        for (int child_ci : cs.by_level[n][ci].children) {
            int child_class = rep.class_of_component[n + 1][child_ci];
            require(child_class >= 0, "InternalError", "child class missing");
            rep.incidence[c][child_class] += 1;
        }
    }

    // deeper levels: the parent's row plus the reachable signature must pin
    // the class uniquely
    for (int n = direct_limit + 1; n <= g.depth; ++n) {
        int t_n = std::min(t_star, g.depth - n);
        for (int ci = 0; ci < (int)cs.by_level[n].size(); ++ci) {
            int id = cl.id_of[n][ci];
            int sig_here = cl.sig_by_t[t_n][id];
            int pc = rep.class_of_component[n - 1][cs.by_level[n][ci].parent_comp];
            require(pc >= 0, "InternalError", "parent component unclassified");
            int assigned = -1;
            for (int c = 0; c < m; ++c) {
                if (rep.incidence[pc][c] == 0) continue;
                if (cl.sig_by_t[t_n][rep_id_of_class[c]] != sig_here) continue;
                require(assigned < 0, "AmbiguousDeepClass",
                        "component class beyond budget not determined by signature");
                assigned = c;
            }
            require(assigned >= 0, "ClassPropagationMismatch",
                    "component beyond budget matches no class");
            rep.class_of_component[n][ci] = assigned;
        }
    }

    // representative independence across the whole built range
    for (int n = first_level; n < g.depth; ++n)
        for (int ci = 0; ci < (int)cs.by_level[n].size(); ++ci) {
            int c = rep.class_of_component[n][ci];
            IntVec row(m, 0);
            for (int child_ci : cs.by_level[n][ci].children)
                row[rep.class_of_component[n + 1][child_ci]] += 1;
            require(row == rep.incidence[c], "RepresentativeDependence",
                    "offspring class counts differ within one class");
        }

    return rep;
}

} // namespace

ClassificationReport classify(const LeveledGraph& g, int budget, int component_cap) {
    return classify_core(g, 1, budget, component_cap);
}

ClassificationReport subgraph_incidence(const LeveledGraph& g, int level,
                                        const std::vector<int>& members, int budget,
                                        int component_cap) {
    LeveledGraph sub = component_subgraph(g, level, members);
    return classify_core(sub, 0, budget, component_cap);
}

ClassificationReport classify_rooted(const LeveledGraph& sub, int budget, int component_cap) {
    return classify_core(sub, 0, budget, component_cap);
}

bool verify_eigen(const ClassificationReport& report, long long N) {
    if (report.verdict != Verdict::Simple) return false;
    int m = (int)report.sizes.size();
    for (int i = 0; i < m; ++i) {
        BigInt lhs = 0;
        for (int j = 0; j < m; ++j) lhs += report.incidence[i][j] * report.sizes[j];
        if (lhs != BigInt(N) * report.sizes[i]) return false;
    }
    return true;
}

} // namespace hyperlip
