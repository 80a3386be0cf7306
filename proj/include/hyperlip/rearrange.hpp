#pragma once

#include <optional>
#include <vector>

#include "hyperlip/matstruct.hpp"

namespace hyperlip {

// Row instance of the grouping problem: split a_j objects of weight u_j into
// p groups. Strict groups weigh exactly `target`, quasi groups at most.
struct RearrangeInstance {
    IntVec a;
    std::vector<long long> u;
    BigInt target;
    long long p = 0;
};

struct RearrangingMatrix {
    std::vector<IntVec> rows; // p × m; column sums reproduce a
};

// Exhaustive backtracking with non-increasing row order; nullopt = Infeasible.
std::optional<RearrangingMatrix> solve_rearrange(const RearrangeInstance& inst);
std::optional<RearrangingMatrix> solve_quasi(const RearrangeInstance& inst);

struct Lemma32Result {
    bool gcd_divides = false;
    bool threshold_holds = false;
    BigInt p;
};

Lemma32Result lemma32_check(const IntVec& a, const std::vector<long long>& u, const BigInt& N);

struct PowerRearrangeResult {
    long long k = 0;
    BigInt target;                        // u * N^k (or N^k for the gcd variant)
    std::vector<RearrangingMatrix> rows;  // one matrix per row of A^k
};

// Prop 3.3(i): A primitive with A u = N u; finds the smallest k ≤ k_budget
// such that every row of A^k rearranges with target gcd(u)·N^k.
std::optional<PowerRearrangeResult> power_rearrange(const IntMat& A,
                                                    const std::vector<long long>& u, long long N,
                                                    long long k_budget = 6);

struct QuasiPowerResult {
    long long n = 0; // 0 when A u = N u exactly (strict path)
    long long k = 0;
    IntMat bordered;  // [[A^n, w],[0, N^n]]
    BigInt target;
    std::vector<RearrangingMatrix> rows; // quasi matrices, last column dropped
};

// Prop 3.3(ii): A primitive with A u ≤ N u; borders with w = N^n u - A^n u.
std::optional<QuasiPowerResult> quasi_power_rearrange(const IntMat& A,
                                                      const std::vector<long long>& u,
                                                      long long N, long long n_budget = 8,
                                                      long long k_budget = 6);

// Cor 3.4: gcd(u) | N allows target N^k with p_i = u_i.
std::optional<PowerRearrangeResult> cor34_rearrange(const IntMat& A,
                                                    const std::vector<long long>& u, long long N,
                                                    long long k_budget = 6);

} // namespace hyperlip
