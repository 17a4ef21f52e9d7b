// Outward-rounded interval arithmetic over MPFR.  Every operation rounds the
// lower endpoint with MPFR_RNDD and the upper endpoint with MPFR_RNDU, so a
// result interval always encloses the exact real value of the expression.
// This is the only floating-point path used for certified quantities.
#pragma once

#include "divlab/numeric.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <string>

namespace divlab {

class Interval {
  public:
    Interval() : lo_(0), hi_(0) {}

    Interval(const Interval&) = default;
    Interval& operator=(const Interval&) = default;

    // Exact endpoints (no rounding applied).
    static Interval exact(const Real& v) { return Interval(v, v); }
    static Interval from_endpoints(Real lo, Real hi) {
        if (lo > hi) throw ValidationError("interval endpoints out of order");
        return Interval(std::move(lo), std::move(hi));
    }

    static Interval from_int(long v) {
        // Longs convert exactly at any working precision >= 64 bits.
        return exact(Real(v));
    }

    static Interval from_integer(const Integer& v) {
        Real lo, hi;
        mpfr_set_z(lo.backend().data(), v.backend().data(), MPFR_RNDD);
        mpfr_set_z(hi.backend().data(), v.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }

    static Interval from_rational(const Rational& q) {
        Real lo, hi;
        mpfr_set_q(lo.backend().data(), q.backend().data(), MPFR_RNDD);
        mpfr_set_q(hi.backend().data(), q.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }

    // Enclosures of mathematical constants.
    static Interval pi() {
        Real lo, hi;
        mpfr_const_pi(lo.backend().data(), MPFR_RNDD);
        mpfr_const_pi(hi.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }
    static Interval euler_mascheroni() {
        Real lo, hi;
        mpfr_const_euler(lo.backend().data(), MPFR_RNDD);
        mpfr_const_euler(hi.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }

    Real width() const {
        Real w;
        mpfr_sub(w.backend().data(), hi_.backend().data(), lo_.backend().data(), MPFR_RNDU);
        return w;
    }
    Real mid() const { return (lo_ + hi_) / 2; }

    bool contains(const Real& v) const { return lo_ <= v && v <= hi_; }
    bool contains(const Rational& q) const {
        // Compare exactly through mpfr_cmp_q to avoid rounding q.
        return mpfr_cmp_q(lo_.backend().data(), q.backend().data()) <= 0 &&
               mpfr_cmp_q(hi_.backend().data(), q.backend().data()) >= 0;
    }
    bool contains(const Interval& other) const {
        return lo_ <= other.lo_ && other.hi_ <= hi_;
    }
    bool intersects(const Interval& other) const {
        return !(hi_ < other.lo_ || other.hi_ < lo_);
    }
    bool is_positive() const { return lo_ > 0; }
    bool is_negative() const { return hi_ < 0; }
    bool straddles_zero() const { return lo_ <= 0 && hi_ >= 0; }

    static Interval hull(const Interval& a, const Interval& b) {
        return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
    }

    friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Real lo, hi;
        mpfr_add(lo.backend().data(), a.lo_.backend().data(), b.lo_.backend().data(), MPFR_RNDD);
        mpfr_add(hi.backend().data(), a.hi_.backend().data(), b.hi_.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        Real lo, hi;
        mpfr_sub(lo.backend().data(), a.lo_.backend().data(), b.hi_.backend().data(), MPFR_RNDD);
        mpfr_sub(hi.backend().data(), a.hi_.backend().data(), b.lo_.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        // Directed products of all endpoint pairs; min/max give the hull.
        const std::array<const Real*, 2> av{&a.lo_, &a.hi_};
        const std::array<const Real*, 2> bv{&b.lo_, &b.hi_};
        Real lo, hi, t;
        bool first = true;
        for (const Real* x : av)
            for (const Real* y : bv) {
                mpfr_mul(t.backend().data(), x->backend().data(), y->backend().data(), MPFR_RNDD);
                if (first || t < lo) lo = t;
                mpfr_mul(t.backend().data(), x->backend().data(), y->backend().data(), MPFR_RNDU);
                if (first || t > hi) hi = t;
                first = false;
            }
        return Interval(lo, hi);
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.straddles_zero()) throw ValidationError("interval division by range containing zero");
        const std::array<const Real*, 2> av{&a.lo_, &a.hi_};
        const std::array<const Real*, 2> bv{&b.lo_, &b.hi_};
        Real lo, hi, t;
        bool first = true;
        for (const Real* x : av)
            for (const Real* y : bv) {
                mpfr_div(t.backend().data(), x->backend().data(), y->backend().data(), MPFR_RNDD);
                if (first || t < lo) lo = t;
                mpfr_div(t.backend().data(), x->backend().data(), y->backend().data(), MPFR_RNDU);
                if (first || t > hi) hi = t;
                first = false;
            }
        return Interval(lo, hi);
    }

    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }
    Interval& operator/=(const Interval& o) { return *this = *this / o; }

    // Range square: clamps the lower endpoint to zero when the argument
    // straddles the origin (the generic product would report -lo*hi there).
    friend Interval square(const Interval& a) {
        Interval s = a * a;
        if (a.lo_ < 0 && a.hi_ > 0) s.lo_ = 0;
        return s;
    }

    // x^e by binary exponentiation; squaring steps use the dedicated range
    // square, so even powers of sign-indefinite ranges stay nonnegative.
    friend Interval pow_ui(Interval base, unsigned long e) {
        Interval acc = Interval::from_int(1);
        while (e > 0) {
            if (e & 1UL) acc *= base;
            e >>= 1UL;
            if (e > 0) base = square(base);
        }
        return acc;
    }

    friend Interval abs(const Interval& a) {
        if (a.lo_ >= 0) return a;
        if (a.hi_ <= 0) return -a;
        return Interval(Real(0), std::max(-a.lo_, a.hi_));
    }

    // Monotone elementary functions: directed rounding on the endpoints.
    friend Interval exp(const Interval& a) {
        Real lo, hi;
        mpfr_exp(lo.backend().data(), a.lo_.backend().data(), MPFR_RNDD);
        mpfr_exp(hi.backend().data(), a.hi_.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }
    friend Interval log(const Interval& a) {
        if (!(a.lo_ > 0)) throw ValidationError("interval log of range touching zero");
        Real lo, hi;
        mpfr_log(lo.backend().data(), a.lo_.backend().data(), MPFR_RNDD);
        mpfr_log(hi.backend().data(), a.hi_.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }
    friend Interval sqrt(const Interval& a) {
        if (a.lo_ < 0) throw ValidationError("interval sqrt of negative range");
        Real lo, hi;
        mpfr_sqrt(lo.backend().data(), a.lo_.backend().data(), MPFR_RNDD);
        mpfr_sqrt(hi.backend().data(), a.hi_.backend().data(), MPFR_RNDU);
        return Interval(lo, hi);
    }

    double lo_double() const { return mpfr_get_d(lo_.backend().data(), MPFR_RNDD); }
    double hi_double() const { return mpfr_get_d(hi_.backend().data(), MPFR_RNDU); }
    double mid_double() const { return mpfr_get_d(mid().backend().data(), MPFR_RNDN); }
    double width_double() const { return mpfr_get_d(width().backend().data(), MPFR_RNDU); }

    std::string str(unsigned digits = 17) const {
        return "[" + lo_.str(digits) + ", " + hi_.str(digits) + "]";
    }

    friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
        return os << iv.str();
    }

  private:
    Interval(Real lo, Real hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}
    Real lo_, hi_;
};

}  // namespace divlab
