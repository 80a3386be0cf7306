#include "hyperlip/rearrange.hpp"

#include <algorithm>
#include <numeric>

#include "hyperlip/error.hpp"

namespace hyperlip {

namespace {

void check_instance(const RearrangeInstance& inst) {
    require(inst.a.size() == inst.u.size(), "InvalidArgument", "a and u dimension mismatch");
    require(!inst.a.empty(), "InvalidArgument", "empty instance");
    require(inst.p >= 0, "InvalidArgument", "negative group count");
    require(inst.target > 0, "InvalidArgument", "group weight must be positive");
    for (const auto& x : inst.a) require(x >= 0, "InvalidArgument", "negative multiplicity");
    for (long long w : inst.u) require(w >= 1, "InvalidArgument", "weights must be positive");
}

BigInt dot(const IntVec& a, const std::vector<long long>& u) {
    BigInt s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * u[j];
    return s;
}

// Backtracking over rows. Rows are chosen in non-increasing lexicographic
// order; each row is a composition c ≤ rem with weight == target (strict) or
// ≤ target (quasi) and exact column consumption overall.
struct Solver {
    const std::vector<long long>& u;
    BigInt target;
    bool strict;
    int m;
    std::vector<IntVec> rows;
    IntVec rem;

    bool fill(long long rows_left, const IntVec* prev) {
        BigInt remaining = dot(rem, u);
        if (rows_left == 0) return remaining == 0;
        if (strict) {
            if (remaining != target * rows_left) return false;
        } else {
            if (remaining > target * rows_left) return false;
        }
        IntVec row(m, 0);
        return descend(rows_left, prev, row, 0, target, true);
    }

    // chooses row[j] for j = col..m-1 with weight budget `room`;
    // `tied` tracks equality with prev over the filled prefix
    bool descend(long long rows_left, const IntVec* prev, IntVec& row, int col,
                 BigInt room, bool tied) {
        if (col == m) {
            if (strict && room != 0) return false;
            rows.push_back(row);
            for (int j = 0; j < m; ++j) rem[j] -= row[j];
            if (fill(rows_left - 1, &rows.back())) return true;
            for (int j = 0; j < m; ++j) rem[j] += row[j];
            rows.pop_back();
            return false;
        }
        BigInt cap = room / u[col];
        if (rem[col] < cap) cap = rem[col];
        if (prev && tied && (*prev)[col] < cap) cap = (*prev)[col];
        for (BigInt c = cap; c >= 0; --c) {
            row[col] = c;
            bool still_tied = tied && prev && c == (*prev)[col];
            if (descend(rows_left, prev, row, col + 1, room - c * u[col], still_tied))
                return true;
        }
        row[col] = 0;
        return false;
    }
};

std::optional<RearrangingMatrix> run_solver(const RearrangeInstance& inst, bool strict) {
    check_instance(inst);
    if (strict) {
        require(dot(inst.a, inst.u) == inst.target * inst.p, "InvalidArgument",
                "strict rearrangement needs a·u = p·target");
    }
    Solver s{inst.u, inst.target, strict, (int)inst.a.size(), {}, inst.a};
    if (!s.fill(inst.p, nullptr)) return std::nullopt;
    return RearrangingMatrix{std::move(s.rows)};
}

long long gcd_of(const std::vector<long long>& u) {
    long long g = 0;
    for (long long x : u) g = std::gcd(g, x);
    return g;
}

IntVec scale_vec(const std::vector<long long>& u) {
    IntVec v;
    v.reserve(u.size());
    for (long long x : u) v.push_back(BigInt(x));
    return v;
}

} // namespace

std::optional<RearrangingMatrix> solve_rearrange(const RearrangeInstance& inst) {
    return run_solver(inst, true);
}

std::optional<RearrangingMatrix> solve_quasi(const RearrangeInstance& inst) {
    return run_solver(inst, false);
}

Lemma32Result lemma32_check(const IntVec& a, const std::vector<long long>& u, const BigInt& N) {
    require(a.size() == u.size() && !a.empty(), "InvalidArgument", "dimension mismatch");
    require(N > 0, "InvalidArgument", "N must be positive");
    BigInt total = 0;
    for (std::size_t j = 0; j < a.size(); ++j) total += a[j] * u[j];
    require(total % N == 0, "InvalidArgument", "a·u must be divisible by N");

    Lemma32Result res;
    res.p = total / N;
    res.gcd_divides = (N % BigInt(gcd_of(u)) == 0);
    BigInt sum = 0, prod = 1;
    for (long long w : u) {
        sum += w;
        prod *= w;
    }
    BigInt threshold = res.p * res.p * sum * prod;
    res.threshold_holds = true;
    for (const auto& x : a)
        if (x <= threshold) res.threshold_holds = false;
    return res;
}

std::optional<PowerRearrangeResult> power_rearrange(const IntMat& A,
                                                    const std::vector<long long>& u, long long N,
                                                    long long k_budget) {
    require(A.size() == u.size(), "InvalidArgument", "matrix and weight dimension mismatch");
    require(is_primitive(A), "NotPrimitive", "power rearrangement needs a primitive matrix");
    IntVec uv = scale_vec(u);
    IntVec Au = mat_apply(A, uv);
    for (std::size_t i = 0; i < u.size(); ++i)
        require(Au[i] == BigInt(N) * u[i], "EigenMismatch", "A u = N u fails");

    long long ug = gcd_of(u);
    BigInt Nk = 1;
    for (long long k = 1; k <= k_budget; ++k) {
        Nk *= N;
        IntMat B = mat_pow(A, k);
        PowerRearrangeResult res;
        res.k = k;
        res.target = BigInt(ug) * Nk;
        bool all = true;
        for (std::size_t i = 0; i < B.size() && all; ++i) {
            RearrangeInstance inst{B[i], u, res.target, u[i] / ug};
            auto C = solve_rearrange(inst);
            if (!C)
                all = false;
            else
                res.rows.push_back(std::move(*C));
        }
        if (all) return res;
    }
    return std::nullopt;
}

std::optional<QuasiPowerResult> quasi_power_rearrange(const IntMat& A,
                                                      const std::vector<long long>& u,
                                                      long long N, long long n_budget,
                                                      long long k_budget) {
    require(A.size() == u.size(), "InvalidArgument", "matrix and weight dimension mismatch");
    require(is_primitive(A), "NotPrimitive", "quasi power rearrangement needs a primitive matrix");
    IntVec uv = scale_vec(u);
    IntVec Au = mat_apply(A, uv);
    bool equal = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
        require(Au[i] <= BigInt(N) * u[i], "InvalidArgument", "A u ≤ N u fails");
        if (Au[i] != BigInt(N) * u[i]) equal = false;
    }
    if (equal) {
        // w = 0 is rejected; the strict path applies unchanged
        auto strict = power_rearrange(A, u, N, k_budget);
        if (!strict) return std::nullopt;
        QuasiPowerResult res;
        res.n = 0;
        res.k = strict->k;
        res.bordered = A;
        res.target = strict->target;
        res.rows = std::move(strict->rows);
        return res;
    }

    int m = (int)u.size();
    long long ug = gcd_of(u);
    for (long long n = 1; n <= n_budget; ++n) {
        IntMat An = mat_pow(A, n);
        BigInt Nn = 1;
        for (long long i = 0; i < n; ++i) Nn *= N;
        IntVec w(m);
        bool strict_everywhere = true;
        IntVec Anu = mat_apply(An, uv);
        for (int i = 0; i < m; ++i) {
            w[i] = Nn * u[i] - Anu[i];
            if (w[i] <= 0) strict_everywhere = false;
        }
        if (!strict_everywhere) continue;

        IntMat bordered(m + 1, IntVec(m + 1, 0));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) bordered[i][j] = An[i][j];
            bordered[i][m] = w[i];
        }
        bordered[m][m] = Nn;

        std::vector<long long> u_ext = u;
        u_ext.push_back(1);

        BigInt Nnk = 1;
        for (long long k = 1; k <= k_budget; ++k) {
            Nnk *= Nn;
            IntMat Bk = mat_pow(bordered, k);
            QuasiPowerResult res;
            res.n = n;
            res.k = k;
            res.bordered = bordered;
            res.target = BigInt(ug) * Nnk;
            bool all = true;
            for (int i = 0; i < m && all; ++i) {
                RearrangeInstance inst{Bk[i], u_ext, res.target, u[i] / ug};
                auto C = solve_rearrange(inst);
                if (!C) {
                    all = false;
                    break;
                }
                // drop the border column; rows become quasi (≤ target)
                RearrangingMatrix q;
                for (auto& row : C->rows) {
                    row.pop_back();
                    q.rows.push_back(row);
                }
                res.rows.push_back(std::move(q));
            }
            if (all) return res;
        }
    }
    return std::nullopt;
}

std::optional<PowerRearrangeResult> cor34_rearrange(const IntMat& A,
                                                    const std::vector<long long>& u, long long N,
                                                    long long k_budget) {
    require(A.size() == u.size(), "InvalidArgument", "matrix and weight dimension mismatch");
    long long ug = gcd_of(u);
    require(N % ug == 0, "GcdDoesNotDivide",
            "gcd(u) = " + std::to_string(ug) + " does not divide N = " + std::to_string(N));
    require(is_primitive(A), "NotPrimitive", "corollary needs a primitive matrix");
    IntVec uv = scale_vec(u);
    IntVec Au = mat_apply(A, uv);
    for (std::size_t i = 0; i < u.size(); ++i)
        require(Au[i] == BigInt(N) * u[i], "EigenMismatch", "A u = N u fails");

    BigInt Nk = 1;
    for (long long k = 1; k <= k_budget; ++k) {
        Nk *= N;
        IntMat B = mat_pow(A, k);
        PowerRearrangeResult res;
        res.k = k;
        res.target = Nk;
        bool all = true;
        for (std::size_t i = 0; i < B.size() && all; ++i) {
            RearrangeInstance inst{B[i], u, res.target, u[i]};
            auto C = solve_rearrange(inst);
            if (!C)
                all = false;
            else
                res.rows.push_back(std::move(*C));
        }
        if (all) return res;
    }
    return std::nullopt;
}

} // namespace hyperlip
