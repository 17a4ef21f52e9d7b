// Core data model: shapes of product systems, integer exponent systems, box
// exponent tuples, weight tuples, exponent-pattern vectors, local restriction
// rules, and the validated problem bundle the rest of the tool consumes.
//
// A "system" consists of k parts; part i has m_i coordinates.  Coordinates
// are indexed (i, j) with 1 <= i <= k, 1 <= j <= m_i, and are stored flat in
// row-major canonical order: (1,1), (1,2), ..., (1,m_1), (2,1), ...
#pragma once

#include "divlab/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace divlab {

// ---------------------------------------------------------------------------
// Shape: the part-size profile (m_1, ..., m_k) and flat-index bookkeeping.
// ---------------------------------------------------------------------------
class Shape {
  public:
    Shape() = default;
    explicit Shape(std::vector<int> part_sizes) : sizes_(std::move(part_sizes)) {
        offsets_.resize(sizes_.size() + 1, 0);
        for (std::size_t i = 0; i < sizes_.size(); ++i) {
            if (sizes_[i] <= 0) throw ValidationError("part sizes must be positive");
            offsets_[i + 1] = offsets_[i] + sizes_[i];
        }
    }

    int parts() const { return static_cast<int>(sizes_.size()); }
    int part_size(int i) const { return sizes_.at(i); }
    int total() const { return offsets_.empty() ? 0 : offsets_.back(); }
    int offset(int i) const { return offsets_.at(i); }
    // flat index of coordinate (i, j), both zero-based here.
    int flat(int i, int j) const { return offsets_.at(i) + j; }
    int part_of(int flat_index) const {
        for (int i = 0; i < parts(); ++i)
            if (flat_index < offsets_[i + 1]) return i;
        throw ValidationError("flat index out of range");
    }

    bool operator==(const Shape& o) const { return sizes_ == o.sizes_; }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    const std::vector<int>& part_sizes() const { return sizes_; }

  private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;
};

// ---------------------------------------------------------------------------
// ExponentSystem: positive integer exponents gamma_{i,j} over a Shape.
// ---------------------------------------------------------------------------
struct ExponentSystem {
    Shape shape;
    std::vector<std::int64_t> gamma;  // flat, canonical order

    void validate() const {
        if (static_cast<int>(gamma.size()) != shape.total())
            throw ValidationError("exponent system size does not match shape");
        if (shape.parts() < 1) throw ValidationError("system needs at least one part");
        for (std::int64_t g : gamma)
            if (g < 1) throw ValidationError("exponents must be >= 1");
    }

    std::int64_t at(int i, int j) const { return gamma[shape.flat(i, j)]; }

    // Common-value of part i under pattern r (flat vector aligned with shape).
    template <typename Vec>
    Integer part_value(int i, const Vec& r) const {
        Integer v = 0;
        for (int j = 0; j < shape.part_size(i); ++j)
            v += Integer(gamma[shape.flat(i, j)]) * Integer(r[shape.flat(i, j)]);
        return v;
    }

    // lcm of all exponents; used for generator-search bounds.
    Integer exponent_lcm() const {
        Integer l = 1;
        for (std::int64_t g : gamma) l = lcm(l, Integer(g));
        return l;
    }
};

// ---------------------------------------------------------------------------
// BoxExponents: positive rational tuple b over the same shape; the census box
// for height H has integer edges floor(H^{b_{i,j}}).
// ---------------------------------------------------------------------------
struct BoxExponents {
    Shape shape;
    std::vector<Rational> b;

    void validate() const {
        if (static_cast<int>(b.size()) != shape.total())
            throw ValidationError("box exponent size does not match shape");
        for (const Rational& q : b)
            if (q <= 0) throw ValidationError("box exponents must be positive");
    }

    const Rational& at(int i, int j) const { return b[shape.flat(i, j)]; }

    Rational part_norm(int i) const {
        Rational s = 0;
        for (int j = 0; j < shape.part_size(i); ++j) s += b[shape.flat(i, j)];
        return s;
    }

    // lcm of denominators, the alpha in lower-bound exponents mu/alpha.
    Integer denominator_lcm() const {
        Integer l = 1;
        for (const Rational& q : b) l = lcm(l, denominator(q));
        return l;
    }
};

// ---------------------------------------------------------------------------
// WeightTuple: nonnegative rational weights a over the shape.  Admissible
// weights are strictly positive with <a, r> >= 1 on every nonzero monoid
// element; admissibility is certified by the lattice layer.
// ---------------------------------------------------------------------------
struct WeightTuple {
    Shape shape;
    std::vector<Rational> a;

    void validate() const {
        if (static_cast<int>(a.size()) != shape.total())
            throw ValidationError("weight size does not match shape");
        for (const Rational& q : a)
            if (q < 0) throw ValidationError("weights must be nonnegative");
    }

    void validate(const Shape& expected) const {
        validate();
        if (shape != expected)
            throw ValidationError("weight shape does not match the system shape");
    }

    bool strictly_positive() const {
        return std::all_of(a.begin(), a.end(), [](const Rational& q) { return q > 0; });
    }

    const Rational& at(int i, int j) const { return a[shape.flat(i, j)]; }

    template <typename Vec>
    Rational pairing(const Vec& r) const {
        Rational s = 0;
        for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * Rational(r[t]);
        return s;
    }
};

// ---------------------------------------------------------------------------
// ExponentVector: a lattice point r in Z_{>=0}^I, with its per-part values
// under a system.  Kept as plain int64 coordinates (patterns stay tiny).
// ---------------------------------------------------------------------------
struct ExponentVector {
    std::vector<std::int64_t> r;

    bool operator==(const ExponentVector& o) const { return r == o.r; }
    bool operator<(const ExponentVector& o) const { return r < o.r; }

    bool is_zero() const {
        return std::all_of(r.begin(), r.end(), [](std::int64_t v) { return v == 0; });
    }
    // componentwise <=
    bool dominated_by(const ExponentVector& o) const {
        for (std::size_t t = 0; t < r.size(); ++t)
            if (r[t] > o.r[t]) return false;
        return true;
    }

    ExponentVector operator+(const ExponentVector& o) const {
        ExponentVector s = *this;
        for (std::size_t t = 0; t < r.size(); ++t) s.r[t] += o.r[t];
        return s;
    }

    std::string str() const {
        std::string out = "(";
        for (std::size_t t = 0; t < r.size(); ++t) {
            if (t) out += ",";
            out += std::to_string(r[t]);
        }
        return out + ")";
    }
};

// Membership in the equal-values monoid of a system.
inline bool in_monoid(const ExponentSystem& sys, const ExponentVector& v) {
    if (static_cast<int>(v.r.size()) != sys.shape.total()) return false;
    Integer first = sys.part_value(0, v.r);
    for (int i = 1; i < sys.shape.parts(); ++i)
        if (sys.part_value(i, v.r) != first) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Restriction rules.  A multiplicatively-defined admissible set is specified
// prime-by-prime: at each listed prime p, the exponent pattern of a tuple
// must lie in an additively closed allowed set containing 0.  Three rule
// kinds cover the supported families:
//   All             -- no constraint at p (useful for overriding defaults),
//   ZeroCoords      -- listed coordinates must carry exponent 0 at p
//                      (coprimality = all coordinates listed),
//   FiniteComplement-- all patterns allowed except an explicit finite list.
// ---------------------------------------------------------------------------
enum class RuleKind { All, ZeroCoords, FiniteComplement };

struct LocalRule {
    std::int64_t p = 0;
    RuleKind kind = RuleKind::All;
    std::vector<int> zero_coords;               // flat indices, for ZeroCoords
    std::vector<ExponentVector> excluded;       // for FiniteComplement

    bool allows(const ExponentVector& pattern) const {
        switch (kind) {
            case RuleKind::All: return true;
            case RuleKind::ZeroCoords:
                for (int t : zero_coords)
                    if (pattern.r[t] != 0) return false;
                return true;
            case RuleKind::FiniteComplement:
                return std::find(excluded.begin(), excluded.end(), pattern) == excluded.end();
        }
        return true;
    }
};

struct RestrictionSpec {
    std::vector<LocalRule> rules;  // at most one rule per prime

    bool unrestricted() const {
        return std::all_of(rules.begin(), rules.end(),
                           [](const LocalRule& r) { return r.kind == RuleKind::All; });
    }
    const LocalRule* rule_at(std::int64_t p) const {
        for (const LocalRule& r : rules)
            if (r.p == p) return &r;
        return nullptr;
    }
};

inline bool is_prime_i64(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Checks primality of moduli, zero-representability, and additive closure of
// every local rule.  Throws ValidationError with a description on failure.
void validate_restriction(const Shape& shape, const RestrictionSpec& spec);

// ---------------------------------------------------------------------------
// ProblemSpec: the full validated bundle.
// ---------------------------------------------------------------------------
struct ProblemSpec {
    ExponentSystem system;
    BoxExponents box;
    RestrictionSpec restriction;
    bool balanced = false;                 // all <gamma_i, b_i> equal
    std::optional<WeightTuple> weights;    // optional explicit a

    void validate() const {
        system.validate();
        box.validate();
        if (system.shape != box.shape)
            throw ValidationError("exponent and box shapes differ");
        if (weights) {
            weights->validate();
            if (weights->shape != system.shape)
                throw ValidationError("weight shape differs from system shape");
        }
        validate_restriction(system.shape, restriction);
        // The balanced flag must agree with the data.
        Rational first = balance_value(0);
        bool all_equal = true;
        for (int i = 1; i < system.shape.parts(); ++i)
            if (balance_value(i) != first) { all_equal = false; break; }
        if (balanced && !all_equal)
            throw ValidationError("balanced flag set but <gamma_i, b_i> differ across parts");
    }

    Rational balance_value(int i) const {
        Rational s = 0;
        for (int j = 0; j < system.shape.part_size(i); ++j)
            s += Rational(system.at(i, j)) * box.at(i, j);
        return s;
    }

    bool is_balanced_data() const {
        Rational first = balance_value(0);
        for (int i = 1; i < system.shape.parts(); ++i)
            if (balance_value(i) != first) return false;
        return true;
    }
};

// Builders for the two standard moment encodings.
//
// k-part product system: gamma = 1_m + ... + 1_m (k parts), box c per part.
ProblemSpec product_moment_problem(int m, int k, const std::vector<Rational>& c);
// (k+1)-part power system: k parts 1_m plus one part (ell), box c per product
// part and |c|/ell on the power part.
ProblemSpec power_moment_problem(int m, int k, int ell, const std::vector<Rational>& c);

}  // namespace divlab
