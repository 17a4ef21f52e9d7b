#include "divlab/model.hpp"

namespace divlab {

namespace {

// Enumerates u with 0 <= u <= f componentwise, invoking fn(u) for each.
template <typename Fn>
void for_each_below(const ExponentVector& f, Fn&& fn) {
    ExponentVector u;
    u.r.assign(f.r.size(), 0);
    while (true) {
        fn(u);
        std::size_t t = 0;
        while (t < u.r.size()) {
            if (u.r[t] < f.r[t]) { ++u.r[t]; break; }
            u.r[t] = 0;
            ++t;
        }
        if (t == u.r.size()) return;
    }
}

}  // namespace

void validate_restriction(const Shape& shape, const RestrictionSpec& spec) {
    std::vector<std::int64_t> seen;
    for (const LocalRule& rule : spec.rules) {
        if (!is_prime_i64(rule.p))
            throw ValidationError("restriction modulus " + std::to_string(rule.p) + " is not prime");
        if (std::find(seen.begin(), seen.end(), rule.p) != seen.end())
            throw ValidationError("duplicate restriction rule at p = " + std::to_string(rule.p));
        seen.push_back(rule.p);

        switch (rule.kind) {
            case RuleKind::All:
                break;
            case RuleKind::ZeroCoords: {
                if (rule.zero_coords.empty())
                    throw ValidationError("zero-coordinate rule lists no coordinates");
                for (int t : rule.zero_coords)
                    if (t < 0 || t >= shape.total())
                        throw ValidationError("zero-coordinate index out of range");
                break;  // always contains 0 and is additively closed
            }
            case RuleKind::FiniteComplement: {
                ExponentVector zero;
                zero.r.assign(shape.total(), 0);
                for (const ExponentVector& f : rule.excluded) {
                    if (static_cast<int>(f.r.size()) != shape.total())
                        throw ValidationError("excluded pattern has wrong arity");
                    for (std::int64_t v : f.r)
                        if (v < 0) throw ValidationError("excluded pattern has negative entry");
                }
                if (!rule.allows(zero))
                    throw ValidationError("allowed set must contain the zero pattern");
                // Additive closure: every excluded f must be unreachable as a
                // sum of two allowed patterns.
                Integer work = 0;
                for (const ExponentVector& f : rule.excluded) {
                    Integer cells = 1;
                    for (std::int64_t v : f.r) cells *= Integer(v + 1);
                    work += cells;
                    if (work > 2'000'000)
                        throw SearchTooLarge("closure check too large for excluded patterns");
                    bool closed = true;
                    for_each_below(f, [&](const ExponentVector& u) {
                        if (!closed) return;
                        ExponentVector v;
                        v.r.resize(f.r.size());
                        for (std::size_t t = 0; t < f.r.size(); ++t) v.r[t] = f.r[t] - u.r[t];
                        if (rule.allows(u) && rule.allows(v)) closed = false;
                    });
                    if (!closed)
                        throw ValidationError(
                            "allowed set at p = " + std::to_string(rule.p) +
                            " is not additively closed (pattern " + f.str() + ")");
                }
                break;
            }
        }
    }
}

ProblemSpec product_moment_problem(int m, int k, const std::vector<Rational>& c) {
    if (m < 1 || k < 1) throw ValidationError("moment parameters must be positive");
    if (static_cast<int>(c.size()) != m) throw ValidationError("box tuple arity must equal m");
    ProblemSpec prob;
    std::vector<int> sizes(k, m);
    Shape shape(sizes);
    prob.system.shape = shape;
    prob.system.gamma.assign(shape.total(), 1);
    prob.box.shape = shape;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) prob.box.b.push_back(c[j]);
    prob.balanced = prob.is_balanced_data();
    prob.validate();
    return prob;
}

ProblemSpec power_moment_problem(int m, int k, int ell, const std::vector<Rational>& c) {
    if (m < 1 || k < 1 || ell < 1) throw ValidationError("moment parameters must be positive");
    if (static_cast<int>(c.size()) != m) throw ValidationError("box tuple arity must equal m");
    ProblemSpec prob;
    std::vector<int> sizes(k, m);
    sizes.push_back(1);
    Shape shape(sizes);
    prob.system.shape = shape;
    prob.system.gamma.assign(shape.total(), 1);
    prob.system.gamma.back() = ell;
    prob.box.shape = shape;
    Rational norm = 0;
    for (const Rational& q : c) norm += q;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) prob.box.b.push_back(c[j]);
    prob.box.b.push_back(norm / ell);
    prob.balanced = prob.is_balanced_data();
    prob.validate();
    return prob;
}

}  // namespace divlab
