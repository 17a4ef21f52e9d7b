// Scalar types shared across the workbench: exact integers and rationals on
// top of GMP, variable-precision reals on top of MPFR, and the Eigen dense
// aliases used by the lattice / polytope code.  All exact paths use Rational;
// floating point appears only inside certified Interval arithmetic and in
// diagnostic fits.
#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace divlab {

namespace mp = boost::multiprecision;

using Integer  = mp::mpz_int;
using Rational = mp::mpq_rational;
// Variable-precision MPFR float with eager evaluation; precision is set per
// process via set_working_precision_bits before any Real is constructed.
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

using MatrixXq = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXq = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using MatrixXz = Eigen::Matrix<Integer, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXz = Eigen::Matrix<Integer, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// Error taxonomy.  Every failure mode the tool reports maps onto one of these;
// the CLI translates them into process exit codes.
// ---------------------------------------------------------------------------
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct SearchTooLarge : std::runtime_error {
    explicit SearchTooLarge(const std::string& what) : std::runtime_error(what) {}
};
struct UnboundedOrDegenerate : std::runtime_error {
    explicit UnboundedOrDegenerate(const std::string& what) : std::runtime_error(what) {}
};
struct ExtrapolationUnstable : std::runtime_error {
    explicit ExtrapolationUnstable(const std::string& what) : std::runtime_error(what) {}
};
struct OverflowRisk : std::runtime_error {
    explicit OverflowRisk(const std::string& what) : std::runtime_error(what) {}
};
struct DivergentTail : std::runtime_error {
    explicit DivergentTail(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Working precision.  MPFR precision is process-global here: intervals are
// only manipulated from the main thread (census parallelism is pure integer
// work), so a single setting keeps every temporary consistent.
// ---------------------------------------------------------------------------
inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2;
}

inline unsigned& working_precision_bits_ref() {
    static unsigned bits = 0;
    return bits;
}

// Sets the MPFR default precision to at least `bits` bits.  Returns the bit
// count actually in effect for freshly constructed Reals.
inline unsigned set_working_precision_bits(unsigned bits) {
    if (bits < 64) bits = 64;
    Real::default_precision(digits10_for_bits(bits));
    Real probe(0);
    unsigned actual = static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
    working_precision_bits_ref() = actual;
    return actual;
}

inline unsigned working_precision_bits() {
    if (working_precision_bits_ref() == 0) set_working_precision_bits(192);
    return working_precision_bits_ref();
}

// ---------------------------------------------------------------------------
// Rational parsing / formatting ("3", "-3/4", "1/2").
// ---------------------------------------------------------------------------
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ValidationError("empty rational literal");
    for (char ch : text) {
        if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '/' || ch == '-' || ch == '+'))
            throw ValidationError("malformed rational literal: " + text);
    }
    try {
        Rational q(text);
        // mpq_rational normalises but does not reject a zero denominator early.
        if (denominator(q) == 0) throw ValidationError("zero denominator: " + text);
        return q;
    } catch (const std::exception&) {
        throw ValidationError("malformed rational literal: " + text);
    }
}

inline std::string to_string(const Rational& q) { return q.str(); }

// ---------------------------------------------------------------------------
// Exact integer helpers.
// ---------------------------------------------------------------------------
inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.backend().data(), base.backend().data(), e);
    return r;
}

// floor(n^(1/k)) for n >= 0, exact.
inline Integer floor_root(const Integer& n, unsigned long k) {
    if (n < 0) throw ValidationError("floor_root of negative value");
    if (k == 0) throw ValidationError("floor_root with k = 0");
    Integer r;
    mpz_root(r.backend().data(), n.backend().data(), k);
    return r;
}

// floor(H^(p/q)) for H >= 0 and exponent p/q >= 0, computed as
// floor((H^p)^(1/q)) in exact integer arithmetic -- never through doubles.
inline Integer floor_pow(const Integer& H, const Rational& e) {
    if (e < 0) throw ValidationError("negative box exponent");
    if (H < 0) throw ValidationError("negative box height");
    if (e == 0) return Integer(1);
    if (H == 0) return Integer(0);
    const Integer p = numerator(e);
    const Integer q = denominator(e);
    if (!mpz_fits_ulong_p(p.backend().data()) || !mpz_fits_ulong_p(q.backend().data()))
        throw OverflowRisk("box exponent too large: " + e.str());
    Integer hp = ipow(H, static_cast<unsigned long>(p));
    return floor_root(hp, static_cast<unsigned long>(q));
}

inline std::int64_t to_int64(const Integer& n) {
    if (!mpz_fits_slong_p(n.backend().data()))
        throw OverflowRisk("integer exceeds 64-bit range: " + n.str());
    return static_cast<std::int64_t>(mpz_get_si(n.backend().data()));
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.backend().data(), a.backend().data(), b.backend().data());
    return r;
}

// Rounds a positive rational up to the nearest integer.
inline Integer ceil_rational(const Rational& q) {
    Integer num = numerator(q), den = denominator(q);
    Integer quo, rem;
    mpz_tdiv_qr(quo.backend().data(), rem.backend().data(), num.backend().data(), den.backend().data());
    if (rem != 0 && q > 0) ++quo;
    return quo;
}

inline Integer floor_rational(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.backend().data(), numerator(q).backend().data(), denominator(q).backend().data());
    return r;
}

}  // namespace divlab
