#pragma once

#include <utility>
#include <vector>

#include "hyperlip/rational.hpp"

namespace hyperlip {

using IntMat = std::vector<std::vector<BigInt>>;
using IntVec = std::vector<BigInt>;

IntMat mat_identity(int n);
IntMat mat_mul(const IntMat& a, const IntMat& b);
IntMat mat_pow(const IntMat& a, long long e);
IntVec mat_apply(const IntMat& a, const IntVec& v);
bool mat_positive(const IntMat& a);
bool mat_equal(const IntMat& a, const IntMat& b);

enum class BlockKind { Zero, Irreducible, Primitive };

// Permutation to block upper-triangular form with irreducible-or-zero
// diagonal blocks (condensation of the class digraph in topological order).
struct FrobeniusForm {
    std::vector<int> permutation;          // position -> original index
    std::vector<std::vector<int>> blocks;  // original indices per block, in order
    std::vector<BlockKind> kinds;
    IntMat permuted;                       // P^t A P

    bool all_primitive_or_zero() const;
};

FrobeniusForm frobenius_form(const IntMat& a);

bool is_irreducible(const IntMat& b);
bool is_primitive(const IntMat& b);  // some power ≤ Wielandt bound is positive
int period(const IntMat& b);         // gcd of cycle lengths; requires irreducible

// Smallest exponent from the constructive block-power argument (iterated lcm
// of block periods, then minimized over divisors) such that every diagonal
// block of the Frobenius form of A^l is primitive or zero.
std::pair<long long, FrobeniusForm> lemma41_exponent(const IntMat& a);

} // namespace hyperlip
