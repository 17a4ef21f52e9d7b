// Lattice layer: the monoid R of exponent patterns with equal part-values,
// its weight-one slice, rank and log-power kappa, minimal generators, the
// exact LP that selects an admissible weight tuple, generation certificates,
// graded counts nu(n), and the block-partition invariant mu.
//
// Enumeration order everywhere is descending lexicographic on the flat
// coordinate vector (coordinates assigned largest value first); results that
// are sets are reported in that canonical order so runs are reproducible.
#pragma once

#include "divlab/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace divlab {

inline constexpr std::int64_t kDefaultNodeBudget = 2'000'000'000LL;

// ---------------------------------------------------------------------------
// Slice enumeration and kappa.
// ---------------------------------------------------------------------------

// All r in the monoid with <a, r> == level (level = 1 gives the slice).
// Requires strictly positive weights.  Throws BudgetExceeded if the search
// tree grows past `budget` nodes.
std::vector<ExponentVector> enumerate_slice(const ExponentSystem& sys,
                                            const WeightTuple& a,
                                            const Rational& level,
                                            std::int64_t budget = kDefaultNodeBudget);

inline std::vector<ExponentVector> enumerate_slice(const ExponentSystem& sys,
                                                   const WeightTuple& a) {
    return enumerate_slice(sys, a, Rational(1));
}

// Rank over Q of a family of integer vectors (fraction-free elimination).
int rank_of(const std::vector<ExponentVector>& vectors);

struct SliceStatistics {
    std::vector<ExponentVector> slice;
    int rank = 0;
    int kappa = 0;  // slice.size() - rank, the predicted log-power
};

SliceStatistics slice_statistics(const ExponentSystem& sys, const WeightTuple& a,
                                 std::int64_t budget = kDefaultNodeBudget);

// ---------------------------------------------------------------------------
// Minimal generators (Hilbert-style basis elements up to a value bound).
// ---------------------------------------------------------------------------
struct GeneratorBasis {
    std::vector<ExponentVector> generators;  // minimal under componentwise <=
    Integer value_bound;                     // common-value search bound used
    bool certified = false;                  // bound >= parts * lcm(exponents)
};

// Enumerates monoid elements with common value N <= value_bound and filters
// the componentwise-minimal ones.  value_bound <= 0 selects the default
// bound parts * lcm(all exponents).
GeneratorBasis minimal_generators(const ExponentSystem& sys,
                                  const Integer& value_bound = Integer(0),
                                  std::int64_t budget = kDefaultNodeBudget);

// ---------------------------------------------------------------------------
// Admissible weight selection.
// ---------------------------------------------------------------------------
struct AdmissibleWeight {
    WeightTuple a;
    Rational objective;   // <a, b> at the optimum, the predicted exponent
    bool certified = false;
};

// Minimises <a, b> over weights with <a, g> >= 1 for every minimal generator
// g and a >= 0, by exact rational vertex enumeration of the constraint
// polyhedron.  The returned point is the barycentre of the optimal face's
// vertex set, which is strictly positive whenever any optimal weight is;
// throws UnboundedOrDegenerate otherwise.  The result is re-verified against
// generators recomputed at twice the value bound.
AdmissibleWeight find_a(const ExponentSystem& sys, const BoxExponents& b,
                        const Integer& value_bound = Integer(0),
                        std::int64_t budget = kDefaultNodeBudget);

// The closed-form weight tuple for the (m, k, ell) power-moment system:
// 1/((k+1) ell) on each product coordinate and 1/(k+1) on the power part.
WeightTuple canonical_a(int m, int k, int ell);

// ---------------------------------------------------------------------------
// Generation certificate.
// ---------------------------------------------------------------------------
struct GenerationCertificate {
    bool generated = false;
    Rational depth;                              // weight bound swept
    std::optional<ExponentVector> counterexample;  // first failure in order
};

// Checks that every monoid element with <a, r> <= depth is a nonnegative
// integer combination of slice elements.  First failure in the canonical
// sweep order is returned as the counterexample.
GenerationCertificate check_generation(const ExponentSystem& sys, const WeightTuple& a,
                                       const Rational& depth = Rational(4),
                                       std::int64_t budget = kDefaultNodeBudget);

// ---------------------------------------------------------------------------
// Graded counts nu(n) = #{r in R : <a, r> = n}, optionally restricted to the
// patterns allowed by a local rule.  Levels are integer-graded, which is the
// relevant grading once the slice generates the monoid.
// ---------------------------------------------------------------------------
std::vector<Integer> nu_vector(const ExponentSystem& sys, const WeightTuple& a,
                               int nmax, const LocalRule* rule = nullptr,
                               std::int64_t budget = kDefaultNodeBudget);

Integer nu_count(const ExponentSystem& sys, const WeightTuple& a, int n,
                 const LocalRule* rule = nullptr,
                 std::int64_t budget = kDefaultNodeBudget);

// ---------------------------------------------------------------------------
// Block-partition invariant mu: the maximum number of blocks in a partition
// of the coordinate set such that each block carries equal weighted value
// across parts.  Requires a balanced system; coordinate count is capped at
// 16 (the exact-cover DP is exponential in it).
// ---------------------------------------------------------------------------
struct PartitionCertificate {
    int mu = 0;
    std::vector<std::uint32_t> block_masks;  // bitmasks over flat coordinates
    std::vector<Rational> block_values;      // common value N_u per block
};

PartitionCertificate mu_invariant(const ExponentSystem& sys, const BoxExponents& b);

}  // namespace divlab
