// Exact counting: brute-force energy counts through per-part value counters,
// dense/segmented divisor-moment sieves, power-moment sieves, weighted-box
// moments, signed singular-matrix counts, and coprimality-restricted moments.
// Everything here returns exact integers; floating point never touches a
// count.  All operations accept a thread count and must return bit-identical
// results for any worker count.
#pragma once

#include "divlab/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace divlab {

struct CountOptions {
    int threads = 1;
    // Elementary-operation ceiling per call; exceeding it throws
    // BudgetExceeded (an error, never silent truncation).
    std::int64_t op_budget = 2'000'000'000LL;
    // Cell ceiling for one dense counter array; larger ranges are processed
    // in segments of this size.
    std::int64_t dense_cells = 200'000'000LL;
};

// Box edge lengths floor(H^{b_t}) for every flat coordinate, by exact
// integer power/root evaluation.
std::vector<Integer> box_edges(const BoxExponents& box, const Integer& H);

// #{x in box(H^b) meeting the restriction : part values all equal}, by
// accumulating one value counter per part (parts with identical data share
// one counter) and summing products of per-part multiplicities over common
// values.  Finite-complement rules are handled by keying counters with the
// local exponent patterns the rule can see.
Integer energy_bruteforce(const ProblemSpec& spec, const Integer& H,
                          const CountOptions& opts = {});

// sum_n tau_m(n; X)^k over the rectangular box X: tau accumulated by m
// nested divisor loops into a dense array, segmented when the value range
// exceeds the dense-cell budget.
Integer moment_divisor_sieve(int m, int k, const std::vector<Integer>& X,
                             const CountOptions& opts = {});

// sum_y tau_m(y^ell; X)^k: factor each y, then count ordered m-factorisations
// of y^ell inside the box by distributing prime exponents.
Integer moment_power_sieve(int m, int k, int ell, const std::vector<Integer>& X,
                           const CountOptions& opts = {});

// sum_n (#{d in box(H^c) : prod d_j^{xi_j} = n})^k.
Integer tau_xi_moment(const std::vector<std::int64_t>& xi, int k,
                      const std::vector<Rational>& c, const Integer& H,
                      const CountOptions& opts = {});

// #{(a,b) in [1,X]^2 : ab is a perfect square}, via the squarefree-kernel
// identity: sum over squarefree s <= X of floor(sqrt(X/s))^2.  Fast and
// independent of the divisor sieves; used as a cross-oracle.
Integer square_product_pair_count(const Integer& X, const CountOptions& opts = {});

// #{(a,b,c,d) in [-H,H]^4 : ad = bc}, via the signed value counter
// N(v) = #{(a,d) : ad = v}: the answer is sum_v N(v)^2.
Integer singular_matrix_count(const Integer& H, const CountOptions& opts = {});

// Same but with all four entries nonzero (reciprocal-entry determinant).
Integer egyptian_singular_count(const Integer& H, const CountOptions& opts = {});

// sum over n coprime to q of tau(n; X, X)^2.
Integer restricted_moment(const Integer& q, const Integer& X,
                          const CountOptions& opts = {});

struct CensusRow {
    Integer H;
    Integer count;
    std::string method;
    double seconds = 0.0;
};

struct CensusResult {
    std::vector<CensusRow> rows;
};

// Exact counts over a grid of H values.  Each row records which engine ran:
// specs matching a plain product/power moment with trivial restriction are
// routed to the sieves, everything else to the brute-force counter.
CensusResult census_grid(const ProblemSpec& spec, const std::vector<Integer>& H_values,
                         const CountOptions& opts = {});

}  // namespace divlab
