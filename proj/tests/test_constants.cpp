// Certified analytic constants and Euler products: enclosures must bracket
// independently computed reference digits, shrink when budgets grow, and
// agree with exact rational local factors where those exist.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divlab/constants.hpp"
#include "divlab/lattice.hpp"
#include "divlab/model.hpp"

using namespace divlab;

namespace {

// Pin the MPFR working precision before the first Real is constructed.
[[maybe_unused]] const unsigned kPrecisionBits = set_working_precision_bits(192);

// 40-digit references computed with an independent arbitrary-precision tool.
const char* kZeta2 = "1.644934066848226436472415166646025189219";
const char* kGamma = "0.5772156649015328606065120900824024310422";
const char* kZetaPrime2 = "-0.9375482543158437537025740945678649778979";
const char* kA = "-0.5113174472170867191219879264286107686172";
const char* kTwoOverZeta2 = "1.215854203708053257326553558516731666852";
const char* kSixOverPiSq = "0.6079271018540266286632767792583658334262";

ProblemSpec pair_product() { return product_moment_problem(2, 2, {Rational(1), Rational(1)}); }

WeightTuple pair_weights() {
    WeightTuple a;
    a.shape = Shape({2, 2});
    a.a.assign(4, Rational(1, 2));
    return a;
}

RestrictionSpec coprime_at(std::initializer_list<std::int64_t> primes, int total) {
    RestrictionSpec spec;
    for (std::int64_t p : primes) {
        LocalRule rule;
        rule.p = p;
        rule.kind = RuleKind::ZeroCoords;
        for (int t = 0; t < total; ++t) rule.zero_coords.push_back(t);
        spec.rules.push_back(rule);
    }
    return spec;
}

// Enclosures tighter than the 40-digit references cannot contain the parsed
// literal, so compare midpoints against the reference instead.
bool close_to(const Interval& x, const char* reference, double tol = 1e-38) {
    Real err = x.mid() - Real(reference);
    return abs(err) < Real(tol);
}

}  // namespace

TEST_CASE("zeta(2) and Euler-Mascheroni enclosures") {
    Interval z = zeta2();
    CHECK(close_to(z, kZeta2));
    CHECK(z.width_double() < 1e-40);
    Interval g = euler_gamma();
    CHECK(close_to(g, kGamma));
    CHECK(g.width_double() < 1e-40);
    Interval two_over = Interval::from_int(2) / z;
    CHECK(close_to(two_over, kTwoOverZeta2));
    Interval six_over = Interval::from_int(6) / pow_ui(Interval::pi(), 2);
    CHECK(close_to(six_over, kSixOverPiSq));
}

TEST_CASE("zeta'(2) enclosure brackets the reference digits") {
    Interval zp = zeta_prime2();
    CHECK(zp.contains(Real(kZetaPrime2)));
    CHECK(zp.width_double() <= 1e-16);
    CHECK(zp.is_negative());
    // Higher requested precision narrows, never shifts, the enclosure.
    Interval tight = zeta_prime2(120);
    CHECK(zp.contains(tight));
    CHECK(close_to(tight, kZetaPrime2));
}

TEST_CASE("secondary coefficient enclosure") {
    Interval a = constant_A();
    CHECK(a.contains(Real(kA)));
    CHECK(a.width_double() <= 1e-15);
    // The defining combination evaluated in interval arithmetic must agree.
    Interval z = zeta2();
    Interval rebuilt =
        (Interval::from_int(4) * euler_gamma() - Interval::from_int(2) * zeta_prime2() / z -
         Interval::from_int(1) - Interval::from_int(2) * z) / z;
    CHECK(rebuilt.intersects(a));
    CHECK(rebuilt.contains(Real(kA)));
    // Affine transport: 8A + 16 computed two ways encloses the same point.
    Interval lhs = Interval::from_int(8) * a + Interval::from_int(16);
    CHECK(lhs.contains(Real(8 * Real(kA) + 16)));
}

TEST_CASE("pair-product Euler factor equals 1/zeta(2)") {
    ProblemSpec p = pair_product();
    Interval ep = euler_product(p.system, p.restriction, pair_weights());
    CHECK(ep.width_double() <= 1e-6);
    CHECK(ep.contains(Real(kSixOverPiSq)));
}

TEST_CASE("square-pair encoding reproduces the same constant") {
    ProblemSpec p = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
    Interval ep = euler_product(p.system, p.restriction, canonical_a(2, 1, 2));
    CHECK(ep.width_double() <= 1e-6);
    CHECK(ep.contains(Real(kSixOverPiSq)));
}

TEST_CASE("trivial diagonal system has Euler factor one") {
    ExponentSystem sys;
    sys.shape = Shape({1, 1});
    sys.gamma = {1, 1};
    WeightTuple a;
    a.shape = sys.shape;
    a.a = {Rational(1, 2), Rational(1, 2)};
    Interval ep = euler_product(sys, RestrictionSpec{}, a);
    CHECK(ep.contains(Rational(1)));
    CHECK(ep.width_double() <= 1e-6);
}

TEST_CASE("enclosures nest as the prime cutoff grows") {
    ProblemSpec p = pair_product();
    EulerOptions small, medium, large;
    small.prime_cutoff = 10'000;
    medium.prime_cutoff = 100'000;
    large.prime_cutoff = 1'000'000;
    Interval a = euler_product(p.system, p.restriction, pair_weights(), small);
    Interval b = euler_product(p.system, p.restriction, pair_weights(), medium);
    Interval c = euler_product(p.system, p.restriction, pair_weights(), large);
    CHECK(a.contains(b));
    CHECK(b.contains(c));
    CHECK(a.contains(Real(kSixOverPiSq)));
    CHECK(c.width_double() < a.width_double());
}

TEST_CASE("enclosures nest as the graded-count cutoff grows") {
    ProblemSpec p = pair_product();
    EulerOptions shallow, deep;
    shallow.level_cutoff = 16;
    deep.level_cutoff = 64;
    Interval a = euler_product(p.system, p.restriction, pair_weights(), shallow);
    Interval b = euler_product(p.system, p.restriction, pair_weights(), deep);
    CHECK(a.contains(b));
    CHECK(a.contains(Real(kSixOverPiSq)));
}

TEST_CASE("coprimality ratios have exact closed forms") {
    ProblemSpec p = pair_product();
    WeightTuple a = pair_weights();

    RestrictionRatio r2 = restriction_ratio(p.system, a, coprime_at({2}, 4));
    REQUIRE(r2.exact.has_value());
    CHECK(*r2.exact == Rational(1, 12));
    CHECK(r2.value.contains(Rational(1, 12)));

    RestrictionRatio r3 = restriction_ratio(p.system, a, coprime_at({3}, 4));
    REQUIRE(r3.exact.has_value());
    CHECK(*r3.exact == Rational(2, 9));

    // Independent primes multiply: coprime to both 2 and 3.
    RestrictionRatio r6 = restriction_ratio(p.system, a, coprime_at({2, 3}, 4));
    REQUIRE(r6.exact.has_value());
    CHECK(*r6.exact == Rational(1, 54));

    // Empty restriction: the ratio is exactly one.
    RestrictionRatio r1 = restriction_ratio(p.system, a, RestrictionSpec{});
    REQUIRE(r1.exact.has_value());
    CHECK(*r1.exact == Rational(1));
}

TEST_CASE("general coprime factor formula (p-1)^3 / (p^2 (p+1))") {
    ProblemSpec p = pair_product();
    WeightTuple a = pair_weights();
    for (std::int64_t q : {2, 3, 5, 7, 11, 13}) {
        RestrictionRatio r = restriction_ratio(p.system, a, coprime_at({q}, 4));
        REQUIRE(r.exact.has_value());
        Rational want = Rational((q - 1) * (q - 1) * (q - 1), q * q * (q + 1));
        CHECK(*r.exact == want);
    }
}

TEST_CASE("restricted product agrees with ratio times unrestricted product") {
    ProblemSpec p = pair_product();
    WeightTuple a = pair_weights();
    RestrictionSpec at2 = coprime_at({2}, 4);
    Interval restricted = euler_product(p.system, at2, a);
    Interval unrestricted = euler_product(p.system, p.restriction, a);
    RestrictionRatio ratio = restriction_ratio(p.system, a, at2);
    Interval recombined = Interval::from_rational(*ratio.exact) * unrestricted;
    // Both routes enclose the same constant, so they must overlap, and the
    // midpoints must agree to well within the certified widths.
    CHECK(restricted.intersects(recombined));
    CHECK(std::abs(restricted.mid_double() - recombined.mid_double()) < 1e-6);
    CHECK(restricted.is_positive());
    CHECK(restricted.hi_double() < unrestricted.lo_double());
}

TEST_CASE("closed-form graded counts match enumeration") {
    ProblemSpec p221 = power_moment_problem(2, 2, 1, {Rational(1), Rational(1)});
    WeightTuple a221 = canonical_a(2, 2, 1);
    auto nv = nu_vector(p221.system, a221, 8);
    for (int n = 0; n <= 8; ++n) {
        auto cf = closed_form_nu(p221.system, a221, n);
        REQUIRE(cf.has_value());
        CHECK(*cf == nv[n]);
    }
    ProblemSpec p212 = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
    WeightTuple a212 = canonical_a(2, 1, 2);
    auto nv2 = nu_vector(p212.system, a212, 8);
    for (int n = 0; n <= 8; ++n) {
        auto cf = closed_form_nu(p212.system, a212, n);
        REQUIRE(cf.has_value());
        CHECK(*cf == nv2[n]);
    }
    // A non-canonical weight does not match a recognised family.
    WeightTuple off = a221;
    off.a[0] = Rational(1, 4);
    CHECK(!closed_form_nu(p221.system, off, 3).has_value());
}

TEST_CASE("option validation") {
    ProblemSpec p = pair_product();
    EulerOptions bad;
    bad.prime_cutoff = 5;  // too small for a meaningful tail bound
    CHECK_THROWS_AS(euler_product(p.system, p.restriction, pair_weights(), bad), ValidationError);
    EulerOptions bad2;
    bad2.level_cutoff = 1;
    CHECK_THROWS_AS(euler_product(p.system, p.restriction, pair_weights(), bad2), ValidationError);
    CHECK_THROWS_AS(zeta_prime2(40), ValidationError);      // below double precision
    CHECK_THROWS_AS(zeta_prime2(100000), ValidationError);  // beyond the working precision
}
