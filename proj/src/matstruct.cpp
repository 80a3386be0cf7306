#include "hyperlip/matstruct.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

#include "hyperlip/error.hpp"

namespace hyperlip {

IntMat mat_identity(int n) {
    IntMat m(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
    int n = (int)a.size(), k = (int)b.size(), m = (int)b[0].size();
    IntMat out(n, IntVec(m, 0));
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (int j = 0; j < m; ++j) out[i][j] += a[i][t] * b[t][j];
        }
    return out;
}

IntMat mat_pow(const IntMat& a, long long e) {
    require(e >= 0, "InvalidArgument", "negative matrix power");
    IntMat acc = mat_identity((int)a.size());
    IntMat base = a;
    while (e > 0) {
        if (e & 1) acc = mat_mul(acc, base);
        base = mat_mul(base, base);
        e >>= 1;
    }
    return acc;
}

IntVec mat_apply(const IntMat& a, const IntVec& v) {
    int n = (int)a.size();
    IntVec out(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < (int)v.size(); ++j) out[i] += a[i][j] * v[j];
    return out;
}

bool mat_positive(const IntMat& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (x <= 0) return false;
    return true;
}

bool mat_equal(const IntMat& a, const IntMat& b) {
    return a == b;
}

namespace {

void check_square_nonnegative(const IntMat& a) {
    int n = (int)a.size();
    require(n > 0, "InvalidArgument", "empty matrix");
    for (const auto& row : a) {
        require((int)row.size() == n, "InvalidArgument", "matrix not square");
        for (const auto& x : row)
            require(x >= 0, "InvalidArgument", "matrix entries must be nonnegative");
    }
}

std::vector<std::vector<int>> digraph_of(const IntMat& a) {
    int n = (int)a.size();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (a[i][j] > 0) adj[i].push_back(j);
    return adj;
}

// Tarjan, iterative.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj) {
    int n = (int)adj.size();
    std::vector<int> num(n, -1), low(n, 0), stack_pos(n, -1);
    std::vector<int> stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;

    struct Frame { int v; std::size_t edge; };
    for (int root = 0; root < n; ++root) {
        if (num[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        num[root] = low[root] = counter++;
        stack_pos[root] = (int)stack.size();
        stack.push_back(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < adj[f.v].size()) {
                int w = adj[f.v][f.edge++];
                if (num[w] < 0) {
                    num[w] = low[w] = counter++;
                    stack_pos[w] = (int)stack.size();
                    stack.push_back(w);
                    frames.push_back({w, 0});
                } else if (stack_pos[w] >= 0) {
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                if (low[f.v] == num[f.v]) {
                    int base = stack_pos[f.v];
                    std::vector<int> scc;
                    while ((int)stack.size() > base) {
                        scc.push_back(stack.back());
                        stack_pos[stack.back()] = -1;
                        stack.pop_back();
                    }
                    std::sort(scc.begin(), scc.end());
                    sccs.push_back(std::move(scc));
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return sccs;
}

} // namespace

bool FrobeniusForm::all_primitive_or_zero() const {
    for (BlockKind k : kinds)
        if (k == BlockKind::Irreducible) return false;
    return true;
}

FrobeniusForm frobenius_form(const IntMat& a) {
    check_square_nonnegative(a);
    int n = (int)a.size();
    auto adj = digraph_of(a);
    auto sccs = strongly_connected(adj);
    int m = (int)sccs.size();

    std::vector<int> scc_of(n);
    for (int s = 0; s < m; ++s)
        for (int v : sccs[s]) scc_of[v] = s;

    // topological order of the condensation; ties broken by smallest member
    std::vector<std::vector<int>> cadj(m);
    std::vector<int> indeg(m, 0);
    for (int i = 0; i < n; ++i)
        for (int j : adj[i])
            if (scc_of[i] != scc_of[j]) cadj[scc_of[i]].push_back(scc_of[j]);
    for (auto& v : cadj) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (int w : v) indeg[w]++;
    }
    auto cmp = [&](int x, int y) { return sccs[x][0] > sccs[y][0]; };
    std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
    for (int s = 0; s < m; ++s)
        if (indeg[s] == 0) ready.push(s);

    FrobeniusForm form;
    while (!ready.empty()) {
        int s = ready.top();
        ready.pop();
        form.blocks.push_back(sccs[s]);
        for (int v : sccs[s]) form.permutation.push_back(v);
        for (int w : cadj[s])
            if (--indeg[w] == 0) ready.push(w);
    }
    require((int)form.permutation.size() == n, "InternalError", "condensation not a DAG");

    form.permuted.assign(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            form.permuted[i][j] = a[form.permutation[i]][form.permutation[j]];

    for (const auto& block : form.blocks) {
        if (block.size() == 1 && a[block[0]][block[0]] == 0) {
            form.kinds.push_back(BlockKind::Zero);
            continue;
        }
        IntMat sub(block.size(), IntVec(block.size()));
        for (std::size_t i = 0; i < block.size(); ++i)
            for (std::size_t j = 0; j < block.size(); ++j) sub[i][j] = a[block[i]][block[j]];
        form.kinds.push_back(is_primitive(sub) ? BlockKind::Primitive : BlockKind::Irreducible);
    }
    return form;
}

bool is_irreducible(const IntMat& b) {
    check_square_nonnegative(b);
    int n = (int)b.size();
    if (n == 1) return b[0][0] > 0; // needs some positive power of the entry
    auto sccs = strongly_connected(digraph_of(b));
    return (int)sccs.size() == 1;
}

bool is_primitive(const IntMat& b) {
    check_square_nonnegative(b);
    int n = (int)b.size();
    long long wielandt = (long long)(n - 1) * (n - 1) + 1;
    // boolean powers suffice
    std::vector<std::vector<char>> cur(n, std::vector<char>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cur[i][j] = b[i][j] > 0;
    auto all_pos = [&](const std::vector<std::vector<char>>& m) {
        for (const auto& row : m)
            for (char c : row)
                if (!c) return false;
        return true;
    };
    auto bool_mul = [&](const std::vector<std::vector<char>>& x,
                        const std::vector<std::vector<char>>& y) {
        std::vector<std::vector<char>> out(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < n; ++t)
                if (x[i][t])
                    for (int j = 0; j < n; ++j)
                        if (y[t][j]) out[i][j] = 1;
        return out;
    };
    auto base = cur;
    for (long long e = 1; e <= wielandt; ++e) {
        if (all_pos(cur)) return true;
        cur = bool_mul(cur, base);
    }
    return false;
}

int period(const IntMat& b) {
    require(is_irreducible(b), "NotIrreducible", "period needs an irreducible matrix");
    int n = (int)b.size();
    auto adj = digraph_of(b);
    std::vector<int> level(n, -1);
    std::queue<int> queue;
    level[0] = 0;
    queue.push(0);
    long long g = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop();
        for (int w : adj[v]) {
            if (level[w] < 0) {
                level[w] = level[v] + 1;
                queue.push(w);
            } else {
                g = std::gcd(g, (long long)(level[v] + 1 - level[w]));
            }
        }
    }
    // irreducible => BFS reaches everything and some cycle closes
    require(g != 0, "InternalError", "no cycle found in irreducible matrix");
    return (int)(g < 0 ? -g : g);
}

std::pair<long long, FrobeniusForm> lemma41_exponent(const IntMat& a) {
    check_square_nonnegative(a);

    long long ell = 1;
    for (int round = 0; round < 64; ++round) {
        FrobeniusForm form = frobenius_form(mat_pow(a, ell));
        if (form.all_primitive_or_zero()) break;
        long long step = 1;
        for (std::size_t bi = 0; bi < form.blocks.size(); ++bi) {
            if (form.kinds[bi] != BlockKind::Irreducible) continue;
            const auto& block = form.blocks[bi];
            IntMat sub(block.size(), IntVec(block.size()));
            IntMat ap = mat_pow(a, ell);
            for (std::size_t i = 0; i < block.size(); ++i)
                for (std::size_t j = 0; j < block.size(); ++j)
                    sub[i][j] = ap[block[i]][block[j]];
            step = std::lcm(step, (long long)period(sub));
        }
        require(step > 1, "InternalError", "no progress toward primitive blocks");
        ell *= step;
    }

    // minimize over divisors of the constructive exponent
    for (long long d = 1; d <= ell; ++d) {
        if (ell % d != 0) continue;
        FrobeniusForm form = frobenius_form(mat_pow(a, d));
        if (form.all_primitive_or_zero()) return {d, std::move(form)};
    }
    fail("InternalError", "constructive exponent failed the direct test");
}

} // namespace hyperlip
