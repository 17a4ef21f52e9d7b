#include "divlab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "divlab/lattice.hpp"

namespace divlab {

namespace {

Interval from_long(long v) { return Interval::from_int(v); }

// binom(n, r) for integer n >= 0 and small r, computed with exact stepwise
// division.
Integer binom_int(const Integer& n, int r) {
    if (r < 0 || n < r) return Integer(0);
    Integer res = 1;
    for (int i = 1; i <= r; ++i) {
        res *= (n - r + i);
        res /= i;
    }
    return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// Analytic constants.
// ---------------------------------------------------------------------------

Interval zeta2() { return pow_ui(Interval::pi(), 2) / from_long(6); }

Interval euler_gamma() { return Interval::euler_mascheroni(); }

Interval zeta_prime2(unsigned precision_bits) {
    if (precision_bits < 53) throw ValidationError("precision request below 53 bits");
    if (precision_bits > working_precision_bits())
        throw ValidationError("requested certification exceeds the working precision; "
                              "raise the working precision first");
    // Truncation point: the Euler-Maclaurin remainder below decays like
    // log(N)/(42 N^7), so ~7 bits are gained per doubling of N.
    const int shift = std::clamp(static_cast<int>((precision_bits + 16) / 7), 11, 22);
    const long N = 1L << shift;

    Interval partial = Interval::exact(Real(0));
    for (long n = 2; n < N; ++n)
        partial = partial + log(from_long(n)) / from_long(n * n);

    const Interval Nr = from_long(N);
    const Interval logN = log(Nr);
    // Integral of log(t)/t^2 from N to infinity, then the boundary and
    // derivative corrections of Euler-Maclaurin with the B2, B4, B6 terms.
    Interval tail = (logN + from_long(1)) / Nr;
    tail = tail + logN / pow_ui(Nr, 2) / from_long(2);
    tail = tail - (from_long(1) - from_long(2) * logN) / pow_ui(Nr, 3) / from_long(12);
    tail = tail + (from_long(26) - from_long(24) * logN) / pow_ui(Nr, 5) / from_long(720);
    const Interval f5 = (from_long(1044) - from_long(720) * logN) / pow_ui(Nr, 7);
    tail = tail - f5 / from_long(30240);
    // |remainder| <= |B6|/6! * integral |f^(6)| = |f^(5)(N)|/30240, valid since
    // f^(6) keeps one sign beyond x ~ 5.
    const Real rem = (abs(f5) / from_long(30240)).hi();
    tail = tail + Interval::from_endpoints(-rem, rem);

    return -(partial + tail);
}

Interval constant_A(unsigned precision_bits) {
    const Interval z2 = zeta2();
    const Interval zp2 = zeta_prime2(precision_bits);
    const Interval g = euler_gamma();
    const Interval num = from_long(4) * g - from_long(2) * zp2 / z2 - from_long(1) -
                         from_long(2) * z2;
    return num / z2;
}

// ---------------------------------------------------------------------------
// Local-factor machinery.
//
// The exact data per prime class is the polynomial
//   C(x) = (1 - x)^s * sum_{n <= nmax} nu(n) x^n,
// whose value at x = 1/p differs from the true local factor by the graded
// tail sum_{n > nmax} nu(n) x^n (damped by (1-x)^s <= 1, hence one-sided).
// nu(n) <= c0 (n+1)^M unconditionally, where M is the coordinate count and
// c0 = prod_t max(1, 1/a_t): each coordinate of a weight-n element is at
// most n/a_t.  A ratio test turns that into the geometric tail bound below.
// ---------------------------------------------------------------------------

namespace {

struct LocalPoly {
    std::vector<Integer> coeff;       // exact coefficients of C(x)
    std::vector<Interval> coeff_iv;   // the same as point enclosures
    std::vector<Interval> majorant;   // majorant[J] >= sum_{j>J} |c_j| 2^{-(j-J-1)}
    std::vector<std::uint64_t> threshold;  // smallest p for which cutting at J is OK
};

std::vector<Integer> convolve_with_alternating_binomial(const std::vector<Integer>& nu,
                                                        int s) {
    std::vector<Integer> row(static_cast<std::size_t>(s) + 1);
    row[0] = 1;
    for (int t = 1; t <= s; ++t) row[t] = row[t - 1] * (s - t + 1) / t;
    std::vector<Integer> c(nu.size() + static_cast<std::size_t>(s));
    for (std::size_t j = 0; j < c.size(); ++j) {
        Integer acc = 0;
        for (int t = 0; t <= s && t <= static_cast<int>(j); ++t) {
            const std::size_t idx = j - static_cast<std::size_t>(t);
            if (idx >= nu.size()) continue;
            if (t & 1)
                acc -= row[t] * nu[idx];
            else
                acc += row[t] * nu[idx];
        }
        c[j] = acc;
    }
    return c;
}

LocalPoly make_local_poly(const std::vector<Integer>& nu, int s) {
    LocalPoly poly;
    poly.coeff = convolve_with_alternating_binomial(nu, s);
    const std::size_t D = poly.coeff.size() - 1;
    poly.coeff_iv.reserve(poly.coeff.size());
    for (const Integer& c : poly.coeff) poly.coeff_iv.push_back(Interval::from_integer(c));

    // Downward recurrence M_J = |c_{J+1}| + M_{J+1}/2 bounds the cut-off poly
    // tail by M_J * x^{J+1} for every x <= 1/2.
    std::vector<Rational> maj(poly.coeff.size());
    maj[D] = 0;
    for (std::size_t J = D; J-- > 0;)
        maj[J] = Rational(abs(poly.coeff[J + 1])) + maj[J + 1] / 2;
    poly.majorant.reserve(maj.size());
    for (const Rational& m : maj) poly.majorant.push_back(Interval::from_rational(m));

    // Performance-only selector: past this prime, truncating the Horner loop
    // at degree J keeps the (certified) remainder below ~1e-18.  Any slack
    // here costs nothing but width, never soundness.
    poly.threshold.assign(poly.coeff.size(), std::uint64_t(1) << 62);
    for (std::size_t J = 2; J <= D; ++J) {
        const double m = mpfr_get_d(poly.majorant[J].hi().backend().data(), MPFR_RNDU);
        if (m <= 0) {
            poly.threshold[J] = 2;
            continue;
        }
        const double t = std::pow(m / 1e-18, 1.0 / static_cast<double>(J + 1));
        if (t < 9.0e18)
            poly.threshold[J] = static_cast<std::uint64_t>(t * 1.02) + 2;
    }
    return poly;
}

struct TailData {
    Interval tau;        // nu-tail coefficient: sum_{n>nmax} nu(n) x^n <= tau * x^{nmax+1}
    Rational tau_exact;  // the same as a rational, for the prime-tail constant
};

TailData graded_tail_bound(const WeightTuple& a, int nmax) {
    Rational c0 = 1;
    for (const Rational& w : a.a) {
        if (w <= 0) throw ValidationError("weights must be strictly positive");
        if (w < 1) c0 /= w;
    }
    const int M = static_cast<int>(a.a.size());
    // Ratio of consecutive bound terms at x = 1/2 (the worst prime).
    const Rational rho = Rational(ipow(Integer(nmax + 3), static_cast<unsigned long>(M)),
                                  ipow(Integer(nmax + 2), static_cast<unsigned long>(M)) * 2);
    if (rho >= 1)
        throw DivergentTail("graded-count tail fails the ratio test; raise the level cutoff");
    TailData t;
    t.tau_exact = c0 * Rational(ipow(Integer(nmax + 2), static_cast<unsigned long>(M))) /
                  (Rational(1) - rho);
    t.tau = Interval::from_rational(t.tau_exact);
    return t;
}

// Certified enclosure of C(1/p) + graded tail.  The Horner loop is cut at the
// cheapest degree whose certified remainder is negligible.
Interval local_factor(const LocalPoly& poly, std::int64_t p, const Interval& nu_tail_term) {
    const std::size_t D = poly.coeff.size() - 1;
    std::size_t J = D;
    for (std::size_t j = 2; j < D; ++j)
        if (static_cast<std::uint64_t>(p) >= poly.threshold[j]) {
            J = j;
            break;
        }
    const Interval x = Interval::from_rational(Rational(1, static_cast<long>(p)));
    Interval acc = poly.coeff_iv[J];
    for (std::size_t j = J; j-- > 0;) acc = acc * x + poly.coeff_iv[j];
    if (J < D) {
        const Real r = (pow_ui(x, static_cast<unsigned long>(J + 1)) * poly.majorant[J]).hi();
        acc = acc + Interval::from_endpoints(-r, r);
    }
    return acc + nu_tail_term;
}

std::vector<bool> prime_table(std::int64_t limit) {
    std::vector<bool> is_p(static_cast<std::size_t>(limit) + 1, true);
    is_p[0] = false;
    if (limit >= 1) is_p[1] = false;
    for (std::int64_t i = 2; i * i <= limit; ++i)
        if (is_p[static_cast<std::size_t>(i)])
            for (std::int64_t j = i * i; j <= limit; j += i) is_p[static_cast<std::size_t>(j)] = false;
    return is_p;
}

}  // namespace

Interval euler_product(const ExponentSystem& sys, const RestrictionSpec& restriction,
                       const WeightTuple& a, const EulerOptions& opts) {
    sys.validate();
    a.validate(sys.shape);
    validate_restriction(sys.shape, restriction);
    if (opts.prime_cutoff < 11) throw ValidationError("prime cutoff must be at least 11");
    if (opts.level_cutoff < 4 || opts.level_cutoff > 4096)
        throw ValidationError("level cutoff out of range [4, 4096]");
    const int nmax = opts.level_cutoff;
    const std::int64_t P = opts.prime_cutoff;

    const std::vector<ExponentVector> slice = enumerate_slice(sys, a, Rational(1), opts.budget);
    if (slice.empty()) throw UnboundedOrDegenerate("weight tuple has an empty slice");
    const int s = static_cast<int>(slice.size());

    const std::vector<Integer> nu = nu_vector(sys, a, nmax, nullptr, opts.budget);
    if (nu.at(0) != 1) throw ValidationError("graded count at level zero must be one");
    const LocalPoly generic = make_local_poly(nu, s);
    const TailData tails = graded_tail_bound(a, nmax);

    // Per-prime data for the explicitly restricted primes.
    std::map<std::int64_t, LocalPoly> special;
    for (const LocalRule& rule : restriction.rules) {
        if (rule.kind == RuleKind::All) continue;
        if (rule.p > P)
            throw ValidationError("restricted prime exceeds the prime cutoff");
        special.emplace(rule.p, make_local_poly(nu_vector(sys, a, nmax, &rule, opts.budget), s));
    }

    // The graded tail beyond the computed levels, split at p = 7: tiny primes
    // get the honest per-prime value, larger ones share one bound.
    auto nu_tail_at = [&](std::int64_t p) {
        const Interval x = Interval::from_rational(Rational(1, static_cast<long>(p)));
        return Interval::from_endpoints(
            Real(0), (pow_ui(x, static_cast<unsigned long>(nmax + 1)) * tails.tau).hi());
    };
    const Interval shared_nu_tail = nu_tail_at(7);

    const std::vector<bool> is_p = prime_table(P);
    Interval acc = Interval::exact(Real(1));
    for (std::int64_t p = 2; p <= P; ++p) {
        if (!is_p[static_cast<std::size_t>(p)]) continue;
        const auto it = special.find(p);
        const LocalPoly& poly = (it == special.end()) ? generic : it->second;
        const Interval factor =
            local_factor(poly, p, p < 7 ? nu_tail_at(p) : shared_nu_tail);
        if (!(factor.lo() > 0))
            throw DivergentTail("local factor not certified positive at p=" + std::to_string(p));
        acc = acc * factor;
    }

    // Primes beyond the cutoff: |L_p - 1| <= c2/p^2 with c2 from the exact
    // coefficients, summed over odd integers past P.
    const std::size_t D = generic.coeff.size() - 1;
    Rational c2 = 0;
    for (std::size_t j = D; j >= 2; --j) {
        c2 /= P;
        c2 += Rational(abs(generic.coeff[j]));
    }
    c2 += tails.tau_exact / Rational(ipow(Integer(P), static_cast<unsigned long>(nmax - 1)));
    const Rational rel = c2 / Rational(Integer(P) * P);
    if (rel >= Rational(1, 2))
        throw DivergentTail("prime tail fails to certify; raise the prime cutoff");
    const Integer m0 = (P % 2 == 0) ? Integer(P + 1) : Integer(P + 2);
    const Rational t2 = Rational(Integer(1)) / Rational(m0 * m0) +
                        Rational(Integer(1)) / Rational(2 * m0);
    const Rational u = c2 * t2 / (Rational(1) - rel);
    const Real u_hi = Interval::from_rational(u).hi();
    acc = acc * exp(Interval::from_endpoints(-u_hi, u_hi));
    return acc;
}

// ---------------------------------------------------------------------------
// Closed-form graded counts for the canonical moment families.
// ---------------------------------------------------------------------------

namespace {

struct MomentFamily {
    int m = 0, k = 0, ell = 1;
};

std::optional<MomentFamily> detect_family(const ExponentSystem& sys, const WeightTuple& a) {
    const Shape& sh = sys.shape;
    const int parts = sh.parts();
    if (parts < 1) return std::nullopt;
    // Pure product shape: k equal parts, all exponents one, weights 1/k.
    {
        const int m = sh.part_size(0);
        bool ok = true;
        for (int i = 0; i < parts && ok; ++i) ok = sh.part_size(i) == m;
        for (int t = 0; t < sh.total() && ok; ++t) ok = sys.gamma[static_cast<std::size_t>(t)] == 1;
        for (int t = 0; t < sh.total() && ok; ++t)
            ok = a.a[static_cast<std::size_t>(t)] == Rational(1, parts);
        if (ok) return MomentFamily{m, parts, 1};
    }
    // Power shape: k equal product parts plus a single-coordinate power part.
    if (parts >= 2 && sh.part_size(parts - 1) == 1) {
        const int k = parts - 1;
        const int m = sh.part_size(0);
        const std::int64_t ell = sys.gamma[static_cast<std::size_t>(sh.total() - 1)];
        bool ok = ell >= 1 && ell <= 64;
        for (int i = 0; i < k && ok; ++i) ok = sh.part_size(i) == m;
        for (int t = 0; t < sh.total() - 1 && ok; ++t)
            ok = sys.gamma[static_cast<std::size_t>(t)] == 1;
        if (ok) {
            const WeightTuple canon = canonical_a(m, k, static_cast<int>(ell));
            for (std::size_t t = 0; t < a.a.size() && ok; ++t) ok = a.a[t] == canon.a[t];
            if (ok) return MomentFamily{m, k, static_cast<int>(ell)};
        }
    }
    return std::nullopt;
}

Integer family_nu(const MomentFamily& fam, const Integer& n) {
    return ipow(binom_int(Integer(fam.ell) * n + fam.m - 1, fam.m - 1),
                static_cast<unsigned long>(fam.k));
}

// Exact value of sum_n Q(n) x^n for the polynomial interpolating the first
// degree+1 graded counts, via the Newton forward-difference series.
Rational newton_series_sum(const std::vector<Integer>& values, const Rational& x) {
    std::vector<Rational> d(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d[i] = Rational(values[i]);
    for (std::size_t i = 1; i < d.size(); ++i)
        for (std::size_t j = d.size(); j-- > i;) d[j] -= d[j - 1];
    const Rational ratio = x / (Rational(1) - x);
    Rational sum = 0;
    Rational factor = Rational(1) / (Rational(1) - x);
    for (std::size_t t = 0; t < d.size(); ++t) {
        sum += d[t] * factor;
        factor *= ratio;
    }
    return sum;
}

}  // namespace

std::optional<Integer> closed_form_nu(const ExponentSystem& sys, const WeightTuple& a,
                                      const Integer& n) {
    const auto fam = detect_family(sys, a);
    if (!fam) return std::nullopt;
    return family_nu(*fam, n);
}

RestrictionRatio restriction_ratio(const ExponentSystem& sys, const WeightTuple& a,
                                   const RestrictionSpec& restriction,
                                   const EulerOptions& opts) {
    sys.validate();
    a.validate(sys.shape);
    validate_restriction(sys.shape, restriction);
    const int nmax = opts.level_cutoff;

    const std::vector<Integer> nu = nu_vector(sys, a, nmax, nullptr, opts.budget);
    const TailData tails = graded_tail_bound(a, nmax);

    // Closed-form graded counts, cross-checked against the enumerated ones.
    auto fam = detect_family(sys, a);
    if (fam) {
        for (int n = 0; n <= std::min(nmax, 8); ++n)
            if (family_nu(*fam, Integer(n)) != nu[static_cast<std::size_t>(n)]) {
                fam.reset();
                break;
            }
    }

    const int total = sys.shape.total();
    auto forces_zero_pattern = [&](const LocalRule& rule) {
        if (rule.kind != RuleKind::ZeroCoords) return false;
        std::vector<bool> seen(static_cast<std::size_t>(total), false);
        for (int t : rule.zero_coords) seen[static_cast<std::size_t>(t)] = true;
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };

    // Raw sum (no (1-x)^s factor; it cancels in the ratio) with one-sided tail.
    auto raw_sum = [&](const std::vector<Integer>& counts, std::int64_t p) {
        const Interval x = Interval::from_rational(Rational(1, static_cast<long>(p)));
        Interval acc = Interval::from_integer(counts.back());
        for (std::size_t j = counts.size() - 1; j-- > 0;)
            acc = acc * x + Interval::from_integer(counts[j]);
        const Real tail =
            (pow_ui(x, static_cast<unsigned long>(nmax + 1)) * tails.tau).hi();
        return acc + Interval::from_endpoints(Real(0), tail);
    };

    RestrictionRatio out;
    Rational exact_acc = 1;
    bool all_exact = true;
    Interval value = Interval::exact(Real(1));
    for (const LocalRule& rule : restriction.rules) {
        if (rule.kind == RuleKind::All) continue;
        if (fam && forces_zero_pattern(rule)) {
            // Numerator collapses to the empty pattern; denominator has the
            // exact Newton-series value since nu is a polynomial in the level.
            const int degree = (fam->m - 1) * fam->k;
            std::vector<Integer> vals(static_cast<std::size_t>(degree) + 1);
            for (int n = 0; n <= degree; ++n)
                vals[static_cast<std::size_t>(n)] = family_nu(*fam, Integer(n));
            const Rational denom =
                newton_series_sum(vals, Rational(1, static_cast<long>(rule.p)));
            const Rational factor = Rational(1) / denom;
            exact_acc *= factor;
            value = value * Interval::from_rational(factor);
        } else {
            all_exact = false;
            const std::vector<Integer> nu_p = nu_vector(sys, a, nmax, &rule, opts.budget);
            value = value * (raw_sum(nu_p, rule.p) / raw_sum(nu, rule.p));
        }
    }
    out.value = value;
    if (all_exact) out.exact = exact_acc;
    return out;
}

}  // namespace divlab
