// Volume oracles for the two polytopes attached to a weighted system: the
// down-set {t >= 0, sum_r r_{i,j} t_r <= b_{i,j}} indexed by the slice, and
// the fiber {v >= 0, sum_r r_{i,j} v_r = b_{i,j}}.
//
// The authoritative value fed into predictions is the operational limit
//   V = lim_{s->inf} s^rank * exp(-lambda*s) * I(s),
//   I(s) = integral over the down-set of exp(s * sum_r t_r) dt,
// extracted by Richardson extrapolation in 1/s.  I(s) is evaluated exactly
// per triangulation simplex through the divided-difference form of the
// exponential (computed cancellation-free as a corner entry of a bidiagonal
// matrix exponential), so the only error sources are directed rounding and
// the extrapolation tail; both are captured in the returned interval.
//
// The Euclidean fiber volume (chart coordinates + Gram determinant) is kept
// as an independent oracle; the two agree on some systems and differ on
// others, and both behaviours are locked by tests.
#pragma once

#include "divlab/interval.hpp"
#include "divlab/lattice.hpp"
#include "divlab/model.hpp"
#include "divlab/polytope.hpp"

#include <cstdint>
#include <vector>

namespace divlab {

// Down-set / fiber construction from a weighted system.  Columns follow the
// canonical slice order; rows follow flat coordinate order.
HPolytope build_downset(const ExponentSystem& sys, const WeightTuple& a,
                        const BoxExponents& b,
                        std::int64_t budget = kDefaultNodeBudget);
FiberPolytope build_fiber(const ExponentSystem& sys, const WeightTuple& a,
                          const BoxExponents& b,
                          std::int64_t budget = kDefaultNodeBudget);

inline std::vector<Rational> default_s_grid() {
    return {Rational(40), Rational(80), Rational(160), Rational(320)};
}

// I(s) = integral of exp(s * sum_r t_r) over a triangulated down-set,
// summed per simplex in index order.  Exposed so growth/convexity of the
// integrand family can be probed directly.
Interval downset_exponential_integral(const Triangulation& tri, const Rational& s);

// The operational limit described above.  The grid must be an increasing
// doubling sequence (s_{i+1} = 2 s_i) so the Neville weights stay exact.
// Throws UnboundedOrDegenerate when the slice is empty and
// ExtrapolationUnstable when the final two extrapolants disagree by more
// than `rel_tol` relatively.
Interval operational_volume(const ExponentSystem& sys, const WeightTuple& a,
                            const BoxExponents& b,
                            const std::vector<Rational>& s_grid = default_s_grid(),
                            double rel_tol = 1e-3,
                            std::int64_t budget = kDefaultNodeBudget);

// Induced-Euclidean volume of the fiber: exact rational chart volume times
// sqrt(Gram determinant).  Exact (width-zero interval) whenever the product
// under the root is a perfect square; a zero-dimensional fiber (single
// point) counts 1, and an empty fiber counts 0.
Interval fiber_volume_euclidean(const ExponentSystem& sys, const WeightTuple& a,
                                const BoxExponents& b,
                                std::int64_t budget = kDefaultNodeBudget);

// Rejection-sampling cross-check.  `band` is estimate +/- 3 standard errors,
// so exact values should land inside it ~99.7% of the time.
struct MonteCarloVolume {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::int64_t hits = 0;
    Interval band = Interval::exact(Real(0));
};

inline constexpr std::uint64_t kMonteCarloSeed = 0x5eed0fda7a5eedULL;

MonteCarloVolume volume_monte_carlo(const HPolytope& poly, std::int64_t samples,
                                    std::uint64_t seed = kMonteCarloSeed);
MonteCarloVolume volume_monte_carlo(const FiberPolytope& poly, std::int64_t samples,
                                    std::uint64_t seed = kMonteCarloSeed);

// Cross-check against the doubly-stochastic polytope: for the two-part
// all-ones system on m coordinates per part, the operational volume V
// satisfies V = binom(2(m-1), m-1) * B_m / m^(m-1) with B_m the Euclidean
// volume of the doubly-stochastic polytope, so the implied B_m is reported.
// For m = 2 the implied value must be exactly 2 (segment between the two
// permutation matrices).
struct BirkhoffReport {
    int m = 0;
    Interval operational = Interval::exact(Real(0));
    Interval implied_bm = Interval::exact(Real(0));
    Rational conversion;  // m^(m-1) / binom(2(m-1), m-1)
};

BirkhoffReport birkhoff_consistency(int m);

}  // namespace divlab
