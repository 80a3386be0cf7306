#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hyperlip/rational.hpp"

namespace hyperlip {

// A word indexes a tree vertex; symbols run over 1..N and the level is the
// symbol count.
using Word = std::vector<int>;

struct Box {
    RatVec lo, hi;

    int dim() const { return (int)lo.size(); }
    bool contains(const Box& other) const;
    bool contains_point(const RatVec& p) const;
    Rational width(int axis) const { return hi[axis] - lo[axis]; }
    // Squared Euclidean diameter (sum of squared side lengths); exact.
    Rational diameter_sq() const;
    static Box hull(const Box& a, const Box& b);
};

// Chebyshev (max per-axis) gap between two axis boxes; 0 iff they intersect.
Rational box_gap(const Box& a, const Box& b);

struct Similitude {
    Rational ratio;   // in (0,1]; 1 only for the empty composite
    RatMat rotation;  // rational orthogonal
    RatVec translation;

    int dim() const { return (int)translation.size(); }
    RatVec apply(const RatVec& x) const;
    Box apply_box(const Box& b) const;   // exact bounding box of the image
    Similitude then(const Similitude& inner) const; // *this ∘ inner
    static Similitude identity(int d);
    RatVec fixed_point() const;          // requires ratio < 1
};

struct SimilitudeSystem {
    int dimension = 0;
    Rational ratio;
    std::vector<Similitude> maps;   // all share `ratio`
    Box invariant_box;              // S_i(J) ⊆ J for every i

    int branching() const { return (int)maps.size(); }

    // Validates the data (N ≥ 2, exact orthogonality, common ratio in (0,1),
    // invariance of the box). When no box is given one is grown from the
    // fixed-point hull; failure to stabilize within 64 rounds is an error.
    static SimilitudeSystem create(int dimension, const Rational& ratio,
                                   std::vector<std::pair<RatMat, RatVec>> map_data,
                                   std::optional<Box> box = std::nullopt);
};

// The system generating the translated attractor K + t.
SimilitudeSystem translate_system(const SimilitudeSystem& sys, const RatVec& t);

Similitude compose(const SimilitudeSystem& sys, const Word& word);
Box cell_box(const SimilitudeSystem& sys, const Word& word);

enum class Outcome { Intersect, Disjoint, Unknown };

struct IntersectionVerdict {
    Outcome outcome = Outcome::Unknown;
    int witness_depth = 0;
    std::optional<Rational> separation; // exact positive gap when Disjoint
};

// Exact decision oracle for attractor-cell intersection, shared between two
// systems of equal ratio and dimension (use the same system twice for the
// single-attractor case). Pairs of words are reduced to the relative
// isometry h = S_a^{-1} ∘ S_b; survival of a pair depends only on h, so
// refinement becomes a walk on a state graph with memoized verdicts:
//   - every branch dies (boxes separate)  -> Disjoint, with the exact gap
//     r^(n+m) * state gap as a lower bound on the cell distance;
//   - a surviving state repeats           -> the chain pins a common limit
//     point -> Intersect;
//   - budget exhausted                    -> Unknown.
class CellIntersector {
public:
    CellIntersector(const SimilitudeSystem& a, const SimilitudeSystem& b);

    IntersectionVerdict query(const Word& wa, const Word& wb, int refine_budget);

private:
    struct State {
        RatMat M;
        RatVec t;
        bool operator<(const State& o) const;
    };
    enum Status { Exploring = 0, Dies = 1, Cycles = 2, Undecided = 3 };
    struct Entry {
        Status status = Exploring;
        int rel_depth = 0;
        Rational rel_sep;
    };
    struct DfsResult {
        Status status;
        int rel_depth;
        Rational rel_sep;
    };

    DfsResult dfs(const State& s, int depth_left, long long& node_budget);
    State extend(const State& s, int a, int b) const;
    Rational gap(const State& s) const;

    const SimilitudeSystem& sys_a_;
    const SimilitudeSystem& sys_b_;
    Rational r_;
    std::vector<RatMat> rot_a_T_; // transposed rotations of sys_a
    std::map<State, Entry> cache_;
};

// Spec-facing single-system oracle; requires |wa| = |wb| = n ≥ 1, wa ≠ wb.
IntersectionVerdict cells_intersect(const SimilitudeSystem& sys, const Word& wa,
                                    const Word& wb, int refine_budget = 12);

// min over n ≤ depth and box-disjoint pairs at level n of dist(J_i, J_j)/r^n;
// empty optional encodes the +infinity sentinel (no disjoint pair exists).
std::optional<Rational> condition_h_margin(const SimilitudeSystem& sys, int depth);

// Eventually periodic signed expansion alpha = sum a_n 3^{-n}, a_n in {-2,0,2}.
struct SignedTernary {
    std::vector<int> preperiod;
    std::vector<int> period;
    bool dual = false; // alpha admits two expansions (alpha = odd / 3^k)

    Rational value() const;
    int digit(int n) const; // 1-based
};

SignedTernary signed_ternary_expand(const Rational& alpha);

// Digit words over {0,2}; true iff i_k - j_k = alpha_k for all k.
bool alpha_edge(const std::vector<int>& digits_i, const std::vector<int>& digits_j,
                const SignedTernary& expansion);

} // namespace hyperlip
