#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divlab/interval.hpp"
#include "divlab/model.hpp"
#include "divlab/numeric.hpp"

namespace divlab {

// ---------------------------------------------------------------------------
// Certified analytic constants.  Every function returns an enclosure whose
// endpoints are rounded outward, so the true value is always inside.
// ---------------------------------------------------------------------------

// pi^2/6, width a few ulps of the working precision.
Interval zeta2();

// Euler-Mascheroni constant.
Interval euler_gamma();

// d/ds zeta(s) at s = 2, i.e. -sum_{n>=2} log(n)/n^2, via Euler-Maclaurin
// with an explicit remainder bound.  `precision_bits` picks the truncation
// point; the working mpfr precision must already be at least that high.
Interval zeta_prime2(unsigned precision_bits = 80);

// The secondary-term coefficient for the pair-product count:
//   A = (4*gamma - 2*zeta'(2)/zeta(2) - 1 - 2*zeta(2)) / zeta(2).
// Certified width <= 1e-15 at the default precision.
Interval constant_A(unsigned precision_bits = 80);

// ---------------------------------------------------------------------------
// Leading-constant Euler product.
//
// For a weight tuple a with integer-graded counts nu(n) the product runs over
// primes p:  L_p = (1 - 1/p)^s * sum_n nu(n, p) p^{-n}, where s is the slice
// cardinality and nu(n, p) honours the local rule at p (unrestricted primes
// share one generic count vector).  Primes up to `prime_cutoff` are evaluated
// individually with a certified truncation remainder; the remaining primes
// contribute a rigorous [e^{-U}, e^{U}] band derived from |L_p - 1| <= c/p^2.
// ---------------------------------------------------------------------------
struct EulerOptions {
    std::int64_t prime_cutoff = 1'000'000;
    int level_cutoff = 64;  // graded counts are computed exactly up to here
    std::int64_t budget = 2'000'000'000LL;
};

Interval euler_product(const ExponentSystem& sys, const RestrictionSpec& restriction,
                       const WeightTuple& a, const EulerOptions& opts = {});

// ---------------------------------------------------------------------------
// Ratio of the restricted leading constant to the unrestricted one: the
// (1-1/p)^s factors cancel, leaving a product over the restricted primes of
//   sum_n nu(n, p) p^{-n} / sum_n nu(n) p^{-n}.
// When every restricted prime admits a closed-form graded count (the
// recognised moment families with their canonical weights) and the rule
// forces the zero pattern, each factor is an exact rational.  Otherwise only
// the certified enclosure is filled in.
// ---------------------------------------------------------------------------
struct RestrictionRatio {
    std::optional<Rational> exact;  // set when every local factor is exact
    Interval value;
};

RestrictionRatio restriction_ratio(const ExponentSystem& sys, const WeightTuple& a,
                                   const RestrictionSpec& restriction,
                                   const EulerOptions& opts = {});

// Exact graded counts for the canonical moment families:
//   k parts of size m, all exponents 1, optional power part with exponent
//   ell, canonical weights.  Returns nu(n) = binom(ell*n + m - 1, m - 1)^k as
//   a polynomial evaluated at n, or nullopt when the system/weights do not
//   match a recognised family.
std::optional<Integer> closed_form_nu(const ExponentSystem& sys, const WeightTuple& a,
                                      const Integer& n);

}  // namespace divlab
