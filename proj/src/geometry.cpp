#include "hyperlip/geometry.hpp"

#include <algorithm>

namespace hyperlip {

bool Box::contains(const Box& other) const {
    for (int k = 0; k < dim(); ++k)
        if (other.lo[k] < lo[k] || other.hi[k] > hi[k]) return false;
    return true;
}

bool Box::contains_point(const RatVec& p) const {
    for (int k = 0; k < dim(); ++k)
        if (p[k] < lo[k] || p[k] > hi[k]) return false;
    return true;
}

Rational Box::diameter_sq() const {
    Rational s(0);
    for (int k = 0; k < dim(); ++k) {
        Rational w = hi[k] - lo[k];
        s += w * w;
    }
    return s;
}

Box Box::hull(const Box& a, const Box& b) {
    Box out = a;
    for (int k = 0; k < a.dim(); ++k) {
        if (b.lo[k] < out.lo[k]) out.lo[k] = b.lo[k];
        if (b.hi[k] > out.hi[k]) out.hi[k] = b.hi[k];
    }
    return out;
}

Rational box_gap(const Box& a, const Box& b) {
    Rational g(0);
    for (int k = 0; k < a.dim(); ++k) {
        Rational left = b.lo[k] - a.hi[k];
        Rational right = a.lo[k] - b.hi[k];
        if (left > g) g = left;
        if (right > g) g = right;
    }
    return g;
}

RatVec Similitude::apply(const RatVec& x) const {
    RatVec y = mat_apply_q(rotation, x);
    for (int k = 0; k < dim(); ++k) y[k] = ratio * y[k] + translation[k];
    return y;
}

Box Similitude::apply_box(const Box& b) const {
    int d = dim();
    Box out{RatVec(d), RatVec(d)};
    for (int k = 0; k < d; ++k) {
        Rational lo = translation[k], hi = translation[k];
        for (int l = 0; l < d; ++l) {
            Rational c = ratio * rotation[k][l];
            if (c == 0) continue;
            if (c > 0) {
                lo += c * b.lo[l];
                hi += c * b.hi[l];
            } else {
                lo += c * b.hi[l];
                hi += c * b.lo[l];
            }
        }
        out.lo[k] = lo;
        out.hi[k] = hi;
    }
    return out;
}

Similitude Similitude::then(const Similitude& inner) const {
    // (this ∘ inner)(x) = ratio*R*(inner(x)) + t
    Similitude out;
    out.ratio = ratio * inner.ratio;
    out.rotation = mat_mul_q(rotation, inner.rotation);
    RatVec shifted = mat_apply_q(rotation, inner.translation);
    out.translation = translation;
    for (int k = 0; k < dim(); ++k) out.translation[k] += ratio * shifted[k];
    return out;
}

Similitude Similitude::identity(int d) {
    return Similitude{Rational(1), mat_identity_q(d), RatVec(d, Rational(0))};
}

RatVec Similitude::fixed_point() const {
    // Solve (I - r R) x = t by exact Gaussian elimination.
    int d = dim();
    RatMat m(d, RatVec(d + 1));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j)
            m[i][j] = Rational(i == j ? 1 : 0) - ratio * rotation[i][j];
        m[i][d] = translation[i];
    }
    for (int col = 0; col < d; ++col) {
        int pivot = -1;
        for (int row = col; row < d; ++row)
            if (m[row][col] != 0) { pivot = row; break; }
        require(pivot >= 0, "SingularMap", "similitude has no unique fixed point");
        std::swap(m[col], m[pivot]);
        Rational p = m[col][col];
        for (int j = col; j <= d; ++j) m[col][j] /= p;
        for (int row = 0; row < d; ++row) {
            if (row == col || m[row][col] == 0) continue;
            Rational f = m[row][col];
            for (int j = col; j <= d; ++j) m[row][j] -= f * m[col][j];
        }
    }
    RatVec x(d);
    for (int i = 0; i < d; ++i) x[i] = m[i][d];
    return x;
}

SimilitudeSystem SimilitudeSystem::create(int dimension, const Rational& ratio,
                                          std::vector<std::pair<RatMat, RatVec>> map_data,
                                          std::optional<Box> box) {
    require(dimension >= 1, "InvalidArgument", "dimension must be positive");
    require((int)map_data.size() >= 2, "InvalidArgument", "at least 2 maps required");
    require(ratio > 0 && ratio < 1, "InvalidArgument", "ratio must lie strictly in (0,1)");

    SimilitudeSystem sys;
    sys.dimension = dimension;
    sys.ratio = ratio;
    for (auto& [rot, trans] : map_data) {
        require((int)rot.size() == dimension, "InvalidArgument", "rotation dimension mismatch");
        require((int)trans.size() == dimension, "InvalidArgument", "translation dimension mismatch");
        require(mat_is_orthogonal_q(rot), "InvalidArgument", "rational orthogonal rotation required");
        sys.maps.push_back(Similitude{ratio, std::move(rot), std::move(trans)});
    }

    if (box) {
        sys.invariant_box = std::move(*box);
        require(sys.invariant_box.dim() == dimension, "InvalidArgument", "box dimension mismatch");
        for (int k = 0; k < dimension; ++k)
            require(sys.invariant_box.lo[k] <= sys.invariant_box.hi[k], "InvalidArgument",
                    "box lower corner above upper corner");
        for (const auto& s : sys.maps)
            require(sys.invariant_box.contains(s.apply_box(sys.invariant_box)),
                    "InvalidArgument", "supplied box is not invariant");
        return sys;
    }

    // Grow the fixed-point hull until every image sits inside it.
    RatVec p0 = sys.maps[0].fixed_point();
    Box b{p0, p0};
    for (std::size_t i = 1; i < sys.maps.size(); ++i) {
        RatVec p = sys.maps[i].fixed_point();
        b = Box::hull(b, Box{p, p});
    }
    for (int round = 0; round < 64; ++round) {
        Box next = b;
        bool invariant = true;
        for (const auto& s : sys.maps) {
            Box img = s.apply_box(b);
            if (!b.contains(img)) invariant = false;
            next = Box::hull(next, img);
        }
        if (invariant) {
            sys.invariant_box = b;
            return sys;
        }
        b = next;
    }
    fail("NoInvariantBox", "invariant box not reached in 64 growth rounds");
}

SimilitudeSystem translate_system(const SimilitudeSystem& sys, const RatVec& t) {
    // K + t is generated by x -> rR x + d + (I - rR) t.
    SimilitudeSystem out = sys;
    for (auto& s : out.maps) {
        RatVec rt = mat_apply_q(s.rotation, t);
        for (int k = 0; k < out.dimension; ++k)
            s.translation[k] += t[k] - s.ratio * rt[k];
    }
    for (int k = 0; k < out.dimension; ++k) {
        out.invariant_box.lo[k] += t[k];
        out.invariant_box.hi[k] += t[k];
    }
    return out;
}

Similitude compose(const SimilitudeSystem& sys, const Word& word) {
    Similitude acc = Similitude::identity(sys.dimension);
    for (int sym : word) {
        require(sym >= 1 && sym <= sys.branching(), "InvalidWord",
                "symbol " + std::to_string(sym) + " out of range 1.." +
                    std::to_string(sys.branching()));
        acc = acc.then(sys.maps[sym - 1]);
    }
    return acc;
}

Box cell_box(const SimilitudeSystem& sys, const Word& word) {
    return compose(sys, word).apply_box(sys.invariant_box);
}

bool CellIntersector::State::operator<(const State& o) const {
    int d = (int)t.size();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (M[i][j] < o.M[i][j]) return true;
            if (o.M[i][j] < M[i][j]) return false;
        }
    for (int i = 0; i < d; ++i) {
        if (t[i] < o.t[i]) return true;
        if (o.t[i] < t[i]) return false;
    }
    return false;
}

CellIntersector::CellIntersector(const SimilitudeSystem& a, const SimilitudeSystem& b)
    : sys_a_(a), sys_b_(b), r_(a.ratio) {
    require(a.dimension == b.dimension, "InvalidArgument", "dimension mismatch between systems");
    require(a.ratio == b.ratio, "InvalidArgument", "contraction ratio mismatch between systems");
    for (const auto& s : a.maps) rot_a_T_.push_back(mat_transpose_q(s.rotation));
}

CellIntersector::State CellIntersector::extend(const State& s, int a, int b) const {
    // child = S_a^{-1} ∘ h ∘ S_b
    const Similitude& sa = sys_a_.maps[a];
    const Similitude& sb = sys_b_.maps[b];
    State out;
    out.M = mat_mul_q(rot_a_T_[a], mat_mul_q(s.M, sb.rotation));
    RatVec v = mat_apply_q(s.M, sb.translation);
    int d = (int)v.size();
    for (int k = 0; k < d; ++k) v[k] += s.t[k] - sa.translation[k];
    out.t = mat_apply_q(rot_a_T_[a], v);
    for (int k = 0; k < d; ++k) out.t[k] /= r_;
    return out;
}

Rational CellIntersector::gap(const State& s) const {
    Similitude h{Rational(1), s.M, s.t};
    Box img = h.apply_box(sys_b_.invariant_box);
    return box_gap(sys_a_.invariant_box, img);
}

CellIntersector::DfsResult CellIntersector::dfs(const State& s, int depth_left,
                                                long long& node_budget) {
    auto [it, inserted] = cache_.try_emplace(s);
    if (!inserted) {
        if (it->second.status == Exploring)
            return DfsResult{Cycles, 0, Rational(0)}; // state recurs on the path
        return DfsResult{it->second.status, it->second.rel_depth, it->second.rel_sep};
    }
    if (depth_left == 0 || --node_budget <= 0) {
        cache_.erase(it);
        return DfsResult{Undecided, 0, Rational(0)};
    }

    bool any_undecided = false;
    bool have_sep = false;
    Rational best_sep(0);
    int max_rel = 0;

    int na = sys_a_.branching(), nb = sys_b_.branching();
    for (int a = 0; a < na; ++a) {
        for (int b = 0; b < nb; ++b) {
            State child = extend(s, a, b);
            Rational g = gap(child);
            if (g > 0) {
                Rational sep = r_ * g;
                if (!have_sep || sep < best_sep) best_sep = sep;
                have_sep = true;
                if (max_rel < 1) max_rel = 1;
                continue;
            }
            DfsResult res = dfs(child, depth_left - 1, node_budget);
            if (res.status == Cycles) {
                it->second = Entry{Cycles, res.rel_depth + 1, Rational(0)};
                return DfsResult{Cycles, res.rel_depth + 1, Rational(0)};
            }
            if (res.status == Undecided) {
                any_undecided = true;
                continue;
            }
            // child subtree dies
            Rational sep = r_ * res.rel_sep;
            if (!have_sep || sep < best_sep) best_sep = sep;
            have_sep = true;
            if (max_rel < res.rel_depth + 1) max_rel = res.rel_depth + 1;
        }
    }

    if (any_undecided) {
        cache_.erase(it);
        return DfsResult{Undecided, 0, Rational(0)};
    }
    it->second = Entry{Dies, max_rel, best_sep};
    return DfsResult{Dies, max_rel, best_sep};
}

IntersectionVerdict CellIntersector::query(const Word& wa, const Word& wb, int refine_budget) {
    require(refine_budget >= 0, "InvalidArgument", "refine budget must be nonnegative");

    Similitude ca = compose(sys_a_, wa);
    Similitude cb = compose(sys_b_, wb);
    require(ca.ratio == cb.ratio, "InvalidArgument", "words of different length");

    // h0 = ca^{-1} ∘ cb: isometry part R_a^T R_b, shift R_a^T (t_b - t_a)/r^n.
    State h0;
    RatMat ra_t = mat_transpose_q(ca.rotation);
    h0.M = mat_mul_q(ra_t, cb.rotation);
    RatVec diff = cb.translation;
    for (int k = 0; k < (int)diff.size(); ++k) diff[k] -= ca.translation[k];
    h0.t = mat_apply_q(ra_t, diff);
    for (auto& c : h0.t) c /= ca.ratio;

    Rational scale = ca.ratio; // r^n
    Rational g0 = gap(h0);
    if (g0 > 0)
        return IntersectionVerdict{Outcome::Disjoint, 0, scale * g0};

    long long node_budget = 200000;
    DfsResult res = dfs(h0, refine_budget, node_budget);
    switch (res.status) {
        case Dies:
            return IntersectionVerdict{Outcome::Disjoint, res.rel_depth, scale * res.rel_sep};
        case Cycles:
            return IntersectionVerdict{Outcome::Intersect, res.rel_depth, std::nullopt};
        default:
            return IntersectionVerdict{Outcome::Unknown, refine_budget, std::nullopt};
    }
}

IntersectionVerdict cells_intersect(const SimilitudeSystem& sys, const Word& wa,
                                    const Word& wb, int refine_budget) {
    require(wa.size() == wb.size(), "InvalidArgument", "words must have equal length");
    require(!wa.empty(), "InvalidArgument", "words must be nonempty");
    require(wa != wb, "InvalidArgument", "words must differ");
    CellIntersector oracle(sys, sys);
    return oracle.query(wa, wb, refine_budget);
}

std::optional<Rational> condition_h_margin(const SimilitudeSystem& sys, int depth) {
    require(depth >= 1, "InvalidArgument", "depth must be positive");
    std::optional<Rational> margin;
    std::vector<Box> boxes{sys.invariant_box};
    Rational rn(1);
    for (int n = 1; n <= depth; ++n) {
        rn *= sys.ratio;
        std::vector<Box> next;
        next.reserve(boxes.size() * sys.maps.size());
        for (const auto& b : boxes)
            for (const auto& s : sys.maps) next.push_back(s.apply_box(b));
        boxes = std::move(next);
        for (std::size_t i = 0; i < boxes.size(); ++i)
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                Rational g = box_gap(boxes[i], boxes[j]);
                if (g == 0) continue;
                Rational scaled = g / rn;
                if (!margin || scaled < *margin) margin = scaled;
            }
    }
    return margin;
}

Rational SignedTernary::value() const {
    // Horner over big integers; digit-by-digit rational sums would drag a
    // gcd through denominators like 3^|period|.
    BigInt pre_num = 0, p3 = 1;
    for (int d : preperiod) {
        pre_num = pre_num * 3 + d;
        p3 *= 3;
    }
    Rational v(pre_num, p3);
    if (!period.empty()) {
        BigInt per_num = 0, q3 = 1;
        for (int d : period) {
            per_num = per_num * 3 + d;
            q3 *= 3;
        }
        v += Rational(per_num, (q3 - 1) * p3);
    }
    return v;
}

int SignedTernary::digit(int n) const {
    require(n >= 1, "InvalidArgument", "digit index is 1-based");
    int pre = (int)preperiod.size();
    if (n <= pre) return preperiod[n - 1];
    require(!period.empty(), "InvalidArgument", "digit index beyond finite expansion");
    return period[(n - pre - 1) % period.size()];
}

SignedTernary signed_ternary_expand(const Rational& alpha) {
    require(alpha > 0 && alpha < 1, "InvalidArgument", "alpha must lie in (0,1)");

    SignedTernary out;
    // Two expansions exist exactly for odd/3^k.
    {
        BigInt den = rat_den(alpha);
        while (den % 3 == 0) den /= 3;
        out.dual = (den == 1) && (rat_num(alpha) % 2 != 0);
    }

    // Greedy digits on the scaled remainder s (|s| ≤ 1 throughout):
    // pick a in {-2,0,2} minimizing |3s - a|, ties toward 0.
    std::map<Rational, int> seen;
    std::vector<int> digits;
    Rational s = alpha;
    while (!seen.count(s)) {
        seen[s] = (int)digits.size();
        Rational w = 3 * s;
        int best = 0;
        Rational best_abs = rat_abs(w);
        for (int a : {-2, 2}) {
            Rational r = rat_abs(w - a);
            if (r < best_abs) {
                best_abs = r;
                best = a;
            }
        }
        digits.push_back(best);
        s = w - best;
    }
    int start = seen[s];
    out.preperiod.assign(digits.begin(), digits.begin() + start);
    out.period.assign(digits.begin() + start, digits.end());
    return out;
}

bool alpha_edge(const std::vector<int>& digits_i, const std::vector<int>& digits_j,
                const SignedTernary& expansion) {
    require(digits_i.size() == digits_j.size(), "InvalidArgument", "words must have equal length");
    for (int d : digits_i)
        require(d == 0 || d == 2, "InvalidArgument", "digits must lie in {0,2}");
    for (int d : digits_j)
        require(d == 0 || d == 2, "InvalidArgument", "digits must lie in {0,2}");
    require(!expansion.dual, "DualExpansionNotSupported",
            "alpha with two expansions must go through the union decomposition");
    for (std::size_t k = 0; k < digits_i.size(); ++k)
        if (digits_i[k] - digits_j[k] != expansion.digit((int)k + 1)) return false;
    return true;
}

} // namespace hyperlip
