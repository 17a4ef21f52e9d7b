#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divlab/census.hpp"
#include "divlab/constants.hpp"
#include "divlab/interval.hpp"
#include "divlab/lattice.hpp"
#include "divlab/model.hpp"

namespace divlab {

// ---------------------------------------------------------------------------
// Predicted main term  q * H^lambda * (log H)^degree  for a problem:
//   lambda  = <a, b> for the chosen weight tuple,
//   degree  = slice cardinality - slice rank (kappa); certified as the true
//             log-power only when the slice generates the monoid up to the
//             swept depth and the system is balanced, otherwise it is an
//             upper bound on the possible log-power,
//   q       = Euler product times operational volume (certified enclosures).
// ---------------------------------------------------------------------------
struct PredictOptions {
    Rational generation_depth = Rational(4);
    EulerOptions euler{};
    std::vector<Rational> s_grid{};  // empty selects the default doubling grid
    double volume_rel_tol = 1e-3;
    std::int64_t budget = 2'000'000'000LL;
    bool with_euler = true;   // the analytic pieces can be skipped when only
    bool with_volume = true;  // the combinatorial data is wanted
};

struct AsymptoticPrediction {
    Rational lambda{0};
    int kappa = 0;
    int degree = 0;
    bool degree_certified = false;
    WeightTuple a_used{};
    bool a_certified = false;  // weights produced and re-verified by find_a
    GenerationCertificate generation{};
    SliceStatistics slice{};
    bool euler_computed = false;
    bool volume_computed = false;
    Interval euler_factor = Interval::exact(Real(1));
    Interval volume = Interval::exact(Real(1));
    Interval leading = Interval::exact(Real(1));
    std::optional<PartitionCertificate> partition{};
    std::optional<Rational> upper_exponent{};  // balanced systems only
    std::optional<Rational> lower_exponent{};
};

// Assembles the full prediction.  `a` overrides both the spec's stored
// weights and the automatic search.
AsymptoticPrediction predict(const ProblemSpec& spec, std::optional<WeightTuple> a = {},
                             const PredictOptions& opts = {});

// Closed-form log-power for the canonical moment families:
//   binom(ell + m - 1, m - 1)^k - (m - 1) k - 1.
int degree_formula(int m, int k, int ell);

// Upper bound on the log-power for the weighted-exponent count with pattern
// xi: group equal entries, then sum c^k - 1 - k (c - 1) over group sizes c.
int tau_xi_degree_bound(const std::vector<std::int64_t>& xi, int k);

// ---------------------------------------------------------------------------
// Elementary exponent bounds: every balanced system satisfies
//   H^{mu/alpha}  <<  count  <<  H^{min_i ||b_i||},
// where mu is the equal-value block-partition invariant and alpha clears the
// denominators of b.
// ---------------------------------------------------------------------------
struct TrivialBounds {
    Rational upper{0};
    Rational lower{0};
    PartitionCertificate certificate{};
};

TrivialBounds trivial_bounds(const ProblemSpec& spec);

// ---------------------------------------------------------------------------
// Census-versus-prediction diagnostics (floating point, not certified).
// ---------------------------------------------------------------------------
struct ComparisonRow {
    Integer H{0};
    Integer count{0};
    Real main_term{0};
    Real ratio{0};
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    std::vector<Real> fit_coefficients;  // index j holds the (log H)^j coefficient
    Real fitted_leading{0};              // coefficient of (log H)^kappa
    Real residual_rms{0};
    bool ill_conditioned = false;        // grid spans less than one decade
};

// Ratio table against q*H^lambda*(log H)^kappa (+ secondary*H^lambda when a
// known secondary coefficient is supplied) and a least-squares fit of
// count/H^lambda against the basis {(log H)^j : j <= kappa}.
ComparisonReport compare(const CensusResult& census, const AsymptoticPrediction& prediction,
                         std::optional<Real> secondary = {});

struct GrowthVerdict {
    Real slope{0};
    Rational lambda{0};
    bool applicable = false;
};

// Log-log regression of count/(log H)^kappa against H; the verdict is
// positive when the empirical exponent is within 0.15 of lambda (heuristic
// tolerance, documented).
GrowthVerdict classify_growth(const CensusResult& census,
                              const AsymptoticPrediction& prediction);

}  // namespace divlab
