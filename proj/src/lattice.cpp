#include "divlab/lattice.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace divlab {

namespace {

struct Budget {
    std::int64_t remaining;
    explicit Budget(std::int64_t b) : remaining(b) {}
    void charge(std::int64_t cost = 1) {
        remaining -= cost;
        if (remaining < 0) throw BudgetExceeded("lattice enumeration budget exhausted");
    }
};

// DFS over the coordinates of part i, assigning values largest-first so the
// emitted vectors appear in descending lexicographic order.  `target` < 0
// means "no exact common-value constraint".  `weights`/`cap` bound the
// weighted sum when a cap is supplied (cap < 0 disables it).
void enumerate_part(const ExponentSystem& sys, int part, const Integer& target,
                    const WeightTuple* weights, const Rational& cap, Budget& budget,
                    const std::function<void(const std::vector<std::int64_t>&, const Integer&,
                                             const Rational&)>& emit) {
    const Shape& shape = sys.shape;
    const int off = shape.offset(part);
    const int sz = shape.part_size(part);
    std::vector<std::int64_t> cur(sz, 0);

    std::function<void(int, Integer, Rational)> rec = [&](int j, Integer value_acc,
                                                          Rational weight_acc) {
        budget.charge();
        if (j == sz) {
            if (target >= 0 && value_acc != target) return;
            emit(cur, value_acc, weight_acc);
            return;
        }
        const std::int64_t g = sys.gamma[off + j];
        Integer hi_value = -1;
        if (target >= 0) hi_value = (target - value_acc) / g;
        Integer hi_weight = -1;
        if (weights && cap >= 0) {
            const Rational& w = weights->a[off + j];
            // strictly positive weights are validated by the callers
            hi_weight = floor_rational((cap - weight_acc) / w);
        }
        Integer hi = -1;
        if (hi_value >= 0) hi = hi_value;
        if (hi_weight >= 0) hi = (hi < 0) ? hi_weight : std::min(hi, hi_weight);
        if (hi < 0)
            throw ValidationError("unbounded coordinate in part enumeration");
        std::int64_t top = to_int64(hi);
        for (std::int64_t c = top; c >= 0; --c) {
            cur[j] = c;
            Rational w_next = weight_acc;
            if (weights) w_next += weights->a[off + j] * Rational(c);
            rec(j + 1, value_acc + Integer(g) * c, w_next);
        }
        cur[j] = 0;
    };
    rec(0, Integer(0), Rational(0));
}

void require_positive_weights(const ExponentSystem& sys, const WeightTuple& a) {
    a.validate();
    if (a.shape != sys.shape) throw ValidationError("weight shape differs from system shape");
    if (!a.strictly_positive())
        throw ValidationError("enumeration requires strictly positive weights");
}

}  // namespace

// ---------------------------------------------------------------------------
// Slice enumeration.
// ---------------------------------------------------------------------------
std::vector<ExponentVector> enumerate_slice(const ExponentSystem& sys, const WeightTuple& a,
                                            const Rational& level, std::int64_t budget_nodes) {
    sys.validate();
    require_positive_weights(sys, a);
    if (level < 0) throw ValidationError("slice level must be nonnegative");

    Budget budget(budget_nodes);
    const Shape& shape = sys.shape;
    const int k = shape.parts();
    std::vector<ExponentVector> out;
    ExponentVector scratch;
    scratch.r.assign(shape.total(), 0);

    // Parts are filled left to right; part 0 fixes the common value.
    std::function<void(int, Integer, Rational)> fill = [&](int part, Integer value,
                                                           Rational weight_acc) {
        if (part == k) {
            if (weight_acc == level) out.push_back(scratch);
            return;
        }
        const Integer target = (part == 0) ? Integer(-1) : value;
        enumerate_part(sys, part, target, &a, level - weight_acc, budget,
                       [&](const std::vector<std::int64_t>& v, const Integer& part_value,
                           const Rational& part_weight) {
                           const int off = shape.offset(part);
                           for (int j = 0; j < shape.part_size(part); ++j)
                               scratch.r[off + j] = v[j];
                           fill(part + 1, part == 0 ? part_value : value,
                                weight_acc + part_weight);
                           for (int j = 0; j < shape.part_size(part); ++j)
                               scratch.r[off + j] = 0;
                       });
    };
    fill(0, Integer(0), Rational(0));
    return out;
}

// ---------------------------------------------------------------------------
// Exact rank (Bareiss fraction-free elimination on integer rows).
// ---------------------------------------------------------------------------
int rank_of(const std::vector<ExponentVector>& vectors) {
    if (vectors.empty()) return 0;
    const int rows = static_cast<int>(vectors.size());
    const int cols = static_cast<int>(vectors[0].r.size());
    MatrixXz A(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(vectors[i].r.size()) != cols)
            throw ValidationError("rank input rows have mixed arity");
        for (int j = 0; j < cols; ++j) A(i, j) = Integer(vectors[i].r[j]);
    }

    int rank = 0;
    Integer prev = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int i = rank; i < rows; ++i)
            if (A(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != rank) A.row(pivot).swap(A.row(rank));
        for (int i = rank + 1; i < rows; ++i) {
            for (int j = col + 1; j < cols; ++j)
                A(i, j) = (A(rank, col) * A(i, j) - A(i, col) * A(rank, j)) / prev;
            A(i, col) = 0;
        }
        prev = A(rank, col);
        ++rank;
    }
    return rank;
}

SliceStatistics slice_statistics(const ExponentSystem& sys, const WeightTuple& a,
                                 std::int64_t budget) {
    SliceStatistics st;
    st.slice = enumerate_slice(sys, a, Rational(1), budget);
    st.rank = rank_of(st.slice);
    st.kappa = static_cast<int>(st.slice.size()) - st.rank;
    return st;
}

// ---------------------------------------------------------------------------
// Minimal generators.
// ---------------------------------------------------------------------------
GeneratorBasis minimal_generators(const ExponentSystem& sys, const Integer& value_bound,
                                  std::int64_t budget_nodes) {
    sys.validate();
    const Shape& shape = sys.shape;
    const int k = shape.parts();

    const Integer default_bound = Integer(k) * sys.exponent_lcm();
    GeneratorBasis basis;
    basis.value_bound = (value_bound > 0) ? value_bound : default_bound;
    basis.certified = basis.value_bound >= default_bound;
    if (basis.value_bound > 100000)
        throw SearchTooLarge("generator value bound too large: " + basis.value_bound.str());

    Budget budget(budget_nodes);
    const std::int64_t top = to_int64(basis.value_bound);
    for (std::int64_t N = 1; N <= top; ++N) {
        // Per-part solution lists at common value N.
        std::vector<std::vector<std::vector<std::int64_t>>> parts(k);
        bool empty = false;
        for (int i = 0; i < k && !empty; ++i) {
            enumerate_part(sys, i, Integer(N), nullptr, Rational(-1), budget,
                           [&](const std::vector<std::int64_t>& v, const Integer&,
                               const Rational&) { parts[i].push_back(v); });
            if (parts[i].empty()) empty = true;
        }
        if (empty) continue;

        Integer combos = 1;
        for (int i = 0; i < k; ++i) combos *= Integer(parts[i].size());
        budget.charge(to_int64(std::min(combos, Integer(budget.remaining + 1))));

        // Cartesian product in descending-lex order (each part list already is).
        std::vector<int> idx(k, 0);
        ExponentVector cand;
        cand.r.assign(shape.total(), 0);
        while (true) {
            for (int i = 0; i < k; ++i) {
                const int off = shape.offset(i);
                for (int j = 0; j < shape.part_size(i); ++j)
                    cand.r[off + j] = parts[i][idx[i]][j];
            }
            bool minimal = true;
            for (const ExponentVector& g : basis.generators)
                if (g.dominated_by(cand)) { minimal = false; break; }
            if (minimal) basis.generators.push_back(cand);

            int i = k - 1;
            while (i >= 0 && ++idx[i] == static_cast<int>(parts[i].size())) idx[i--] = 0;
            if (i < 0) break;
        }
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Admissible weight LP.
// ---------------------------------------------------------------------------
namespace {

// Exact solve of a square rational system; false when singular.
bool solve_square(MatrixXq A, VectorXq rhs, VectorXq& out) {
    const int n = static_cast<int>(A.rows());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i)
            if (A(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) return false;
        if (pivot != col) {
            A.row(pivot).swap(A.row(col));
            std::swap(rhs(pivot), rhs(col));
        }
        for (int i = col + 1; i < n; ++i) {
            if (A(i, col) == 0) continue;
            const Rational f = A(i, col) / A(col, col);
            for (int j = col; j < n; ++j) A(i, j) -= f * A(col, j);
            rhs(i) -= f * rhs(col);
        }
    }
    out.resize(n);
    for (int i = n - 1; i >= 0; --i) {
        Rational s = rhs(i);
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * out(j);
        out(i) = s / A(i, i);
    }
    return true;
}

struct LpSolution {
    std::vector<Rational> point;  // barycentre of the optimal face
    Rational objective;
};

// min <b, a> over { a >= 0, <g, a> >= 1 for all g }, via exhaustive basic
// solutions.  The feasible region is pointed (contained in the nonnegative
// orthant) and the objective has strictly positive coefficients, so the
// optimum exists and is attained on a bounded face.
LpSolution solve_weight_lp(const std::vector<ExponentVector>& gens,
                           const std::vector<Rational>& objective, int M) {
    struct Row {
        std::vector<Rational> coef;
        Rational rhs;
    };
    std::vector<Row> rows;
    for (const ExponentVector& g : gens) {
        Row r;
        r.coef.reserve(M);
        for (int t = 0; t < M; ++t) r.coef.push_back(Rational(g.r[t]));
        r.rhs = 1;
        rows.push_back(std::move(r));
    }
    for (int t = 0; t < M; ++t) {
        Row r;
        r.coef.assign(M, Rational(0));
        r.coef[t] = 1;
        r.rhs = 0;
        rows.push_back(std::move(r));
    }

    const int R = static_cast<int>(rows.size());
    // Guard the binomial blow-up before enumerating.
    double combos = 1;
    for (int i = 0; i < M; ++i) combos *= static_cast<double>(R - i) / (i + 1);
    if (combos > 5e6) throw SearchTooLarge("weight LP basis enumeration too large");

    std::set<std::vector<Rational>> vertices;
    std::vector<int> pick(M);
    std::function<void(int, int)> choose = [&](int from, int depth) {
        if (depth == M) {
            MatrixXq A(M, M);
            VectorXq rhs(M);
            for (int i = 0; i < M; ++i) {
                for (int j = 0; j < M; ++j) A(i, j) = rows[pick[i]].coef[j];
                rhs(i) = rows[pick[i]].rhs;
            }
            VectorXq x;
            if (!solve_square(A, rhs, x)) return;
            for (int t = 0; t < M; ++t)
                if (x(t) < 0) return;
            for (const ExponentVector& g : gens) {
                Rational s = 0;
                for (int t = 0; t < M; ++t) s += Rational(g.r[t]) * x(t);
                if (s < 1) return;
            }
            std::vector<Rational> key(M);
            for (int t = 0; t < M; ++t) key[t] = x(t);
            vertices.insert(std::move(key));
            return;
        }
        for (int i = from; i <= R - (M - depth); ++i) {
            pick[depth] = i;
            choose(i + 1, depth + 1);
        }
    };
    choose(0, 0);

    if (vertices.empty())
        throw UnboundedOrDegenerate("weight polyhedron has no feasible vertex");

    Rational best;
    bool first = true;
    for (const auto& v : vertices) {
        Rational obj = 0;
        for (int t = 0; t < M; ++t) obj += objective[t] * v[t];
        if (first || obj < best) { best = obj; first = false; }
    }
    std::vector<std::vector<Rational>> optimal;
    for (const auto& v : vertices) {
        Rational obj = 0;
        for (int t = 0; t < M; ++t) obj += objective[t] * v[t];
        if (obj == best) optimal.push_back(v);
    }

    LpSolution sol;
    sol.objective = best;
    sol.point.assign(M, Rational(0));
    for (const auto& v : optimal)
        for (int t = 0; t < M; ++t) sol.point[t] += v[t];
    for (int t = 0; t < M; ++t) sol.point[t] /= Rational(optimal.size());
    return sol;
}

}  // namespace

AdmissibleWeight find_a(const ExponentSystem& sys, const BoxExponents& b,
                        const Integer& value_bound, std::int64_t budget) {
    sys.validate();
    b.validate();
    if (b.shape != sys.shape) throw ValidationError("box shape differs from system shape");
    const int M = sys.shape.total();

    GeneratorBasis basis = minimal_generators(sys, value_bound, budget);
    LpSolution sol = solve_weight_lp(basis.generators, b.b, M);

    // The admissibility re-check sweeps generators at twice the bound; a
    // violation means the first basis missed a constraint, so re-solve once.
    bool verified = false;
    for (int attempt = 0; attempt < 2 && !verified; ++attempt) {
        GeneratorBasis wider = minimal_generators(sys, basis.value_bound * 2, budget);
        verified = true;
        for (const ExponentVector& g : wider.generators) {
            Rational s = 0;
            for (int t = 0; t < M; ++t) s += sol.point[t] * Rational(g.r[t]);
            if (s < 1) { verified = false; break; }
        }
        if (!verified) {
            basis = std::move(wider);
            sol = solve_weight_lp(basis.generators, b.b, M);
        }
    }

    AdmissibleWeight result;
    result.a.shape = sys.shape;
    result.a.a = sol.point;
    result.objective = sol.objective;
    result.certified = basis.certified && verified;
    if (!result.a.strictly_positive())
        throw UnboundedOrDegenerate(
            "no strictly positive weight attains the optimum; the optimal face "
            "lies in a coordinate hyperplane");
    return result;
}

WeightTuple canonical_a(int m, int k, int ell) {
    if (m < 1 || k < 1 || ell < 1) throw ValidationError("moment parameters must be positive");
    std::vector<int> sizes(k, m);
    sizes.push_back(1);
    WeightTuple a;
    a.shape = Shape(sizes);
    const Rational unit(1, static_cast<long>(k + 1) * ell);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) a.a.push_back(unit);
    a.a.push_back(Rational(1, k + 1));
    return a;
}

// ---------------------------------------------------------------------------
// Generation certificate.
// ---------------------------------------------------------------------------
namespace {

bool representable(const ExponentVector& r, const std::vector<ExponentVector>& slice,
                   std::size_t idx) {
    if (r.is_zero()) return true;
    if (idx == slice.size()) return false;
    const ExponentVector& e = slice[idx];
    // Largest feasible multiplicity of slice[idx] inside r.
    std::int64_t cmax = -1;
    for (std::size_t t = 0; t < r.r.size(); ++t) {
        if (e.r[t] == 0) continue;
        const std::int64_t fit = r.r[t] / e.r[t];
        cmax = (cmax < 0) ? fit : std::min(cmax, fit);
    }
    if (cmax < 0) cmax = 0;  // zero slice vector cannot occur, but stay safe
    for (std::int64_t c = cmax; c >= 0; --c) {
        ExponentVector rem = r;
        for (std::size_t t = 0; t < r.r.size(); ++t) rem.r[t] -= c * e.r[t];
        if (representable(rem, slice, idx + 1)) return true;
    }
    return false;
}

}  // namespace

GenerationCertificate check_generation(const ExponentSystem& sys, const WeightTuple& a,
                                       const Rational& depth, std::int64_t budget_nodes) {
    sys.validate();
    require_positive_weights(sys, a);

    GenerationCertificate cert;
    cert.depth = depth;
    const std::vector<ExponentVector> slice = enumerate_slice(sys, a, Rational(1), budget_nodes);

    Budget budget(budget_nodes);
    const Shape& shape = sys.shape;
    const int k = shape.parts();
    ExponentVector scratch;
    scratch.r.assign(shape.total(), 0);
    std::optional<ExponentVector> failure;

    std::function<void(int, Integer, Rational)> sweep = [&](int part, Integer value,
                                                            Rational weight_acc) {
        if (failure) return;
        if (part == k) {
            if (scratch.is_zero()) return;
            if (!representable(scratch, slice, 0)) failure = scratch;
            return;
        }
        const Integer target = (part == 0) ? Integer(-1) : value;
        enumerate_part(sys, part, target, &a, depth - weight_acc, budget,
                       [&](const std::vector<std::int64_t>& v, const Integer& part_value,
                           const Rational& part_weight) {
                           if (failure) return;
                           const int off = shape.offset(part);
                           for (int j = 0; j < shape.part_size(part); ++j)
                               scratch.r[off + j] = v[j];
                           sweep(part + 1, part == 0 ? part_value : value,
                                 weight_acc + part_weight);
                           for (int j = 0; j < shape.part_size(part); ++j)
                               scratch.r[off + j] = 0;
                       });
    };
    sweep(0, Integer(0), Rational(0));

    cert.generated = !failure.has_value();
    cert.counterexample = failure;
    return cert;
}

// ---------------------------------------------------------------------------
// Graded counts.
// ---------------------------------------------------------------------------
std::vector<Integer> nu_vector(const ExponentSystem& sys, const WeightTuple& a, int nmax,
                               const LocalRule* rule, std::int64_t budget_nodes) {
    sys.validate();
    require_positive_weights(sys, a);
    if (nmax < 0) throw ValidationError("nmax must be nonnegative");

    const Shape& shape = sys.shape;
    const int k = shape.parts();
    const int M = shape.total();

    // Excluded-pattern rules are handled by subtracting the finitely many
    // excluded monoid elements from the unrestricted counts afterwards.
    const bool zero_rule = rule && rule->kind == RuleKind::ZeroCoords;
    std::vector<bool> forced_zero(M, false);
    if (zero_rule)
        for (int t : rule->zero_coords) forced_zero[t] = true;

    // Scale weights to integers: w_t = a_t * D.
    Integer D = 1;
    for (const Rational& q : a.a) D = lcm(D, denominator(q));
    std::vector<std::int64_t> w(M);
    for (int t = 0; t < M; ++t) w[t] = to_int64(numerator(a.a[t] * Rational(D)));
    const std::int64_t Dl = to_int64(D);
    const std::int64_t smax = static_cast<std::int64_t>(nmax) * Dl;

    // Common-value cap: value N costs at least N * minrate_i in part i.
    Rational rate_sum = 0;
    for (int i = 0; i < k; ++i) {
        Rational minrate(-1);
        for (int j = 0; j < shape.part_size(i); ++j) {
            const int t = shape.flat(i, j);
            if (zero_rule && forced_zero[t]) continue;
            Rational r = Rational(w[t]) / Rational(sys.gamma[t]);
            if (minrate < 0 || r < minrate) minrate = r;
        }
        if (minrate < 0) minrate = 0;  // whole part forced to zero
        rate_sum += minrate;
    }
    std::int64_t Nmax = 0;
    if (rate_sum > 0) Nmax = to_int64(floor_rational(Rational(smax) / rate_sum));
    // rate_sum == 0 can only happen if every coordinate is forced to zero;
    // then only r = 0 (value 0) survives and Nmax = 0 is correct.

    Budget budget(budget_nodes);

    // Per part: table[N] = map from scaled weight to count.
    using WeightMap = std::map<std::int64_t, Integer>;
    std::vector<std::vector<WeightMap>> table(k);
    for (int i = 0; i < k; ++i) {
        std::vector<WeightMap> dp(static_cast<std::size_t>(Nmax) + 1);
        dp[0][0] = 1;
        for (int j = 0; j < shape.part_size(i); ++j) {
            const int t = shape.flat(i, j);
            if (zero_rule && forced_zero[t]) continue;
            const std::int64_t g = sys.gamma[t];
            std::vector<WeightMap> next(static_cast<std::size_t>(Nmax) + 1);
            for (std::int64_t N = 0; N <= Nmax; ++N)
                for (const auto& [s, cnt] : dp[N])
                    for (std::int64_t c = 0; N + c * g <= Nmax && s + c * w[t] <= smax; ++c) {
                        budget.charge();
                        next[N + c * g][s + c * w[t]] += cnt;
                    }
            dp = std::move(next);
        }
        table[i] = std::move(dp);
    }

    // Combine parts at each common value N and accumulate by total scaled
    // weight; integer levels live at multiples of D.
    std::vector<Integer> nu(static_cast<std::size_t>(nmax) + 1, Integer(0));
    for (std::int64_t N = 0; N <= Nmax; ++N) {
        WeightMap acc = table[0][N];
        for (int i = 1; i < k && !acc.empty(); ++i) {
            WeightMap next;
            for (const auto& [s1, c1] : acc)
                for (const auto& [s2, c2] : table[i][N]) {
                    if (s1 + s2 > smax) break;  // maps are sorted by weight
                    budget.charge();
                    next[s1 + s2] += c1 * c2;
                }
            acc = std::move(next);
        }
        for (const auto& [s, cnt] : acc)
            if (s % Dl == 0) nu[static_cast<std::size_t>(s / Dl)] += cnt;
    }

    if (rule && rule->kind == RuleKind::FiniteComplement) {
        for (const ExponentVector& f : rule->excluded) {
            if (static_cast<int>(f.r.size()) != M) continue;
            if (!in_monoid(sys, f)) continue;
            const Rational lvl = a.pairing(f.r);
            if (denominator(lvl) == 1) {
                const Integer n = numerator(lvl);
                if (n >= 0 && n <= nmax) nu[static_cast<std::size_t>(to_int64(n))] -= 1;
            }
        }
    }
    return nu;
}

Integer nu_count(const ExponentSystem& sys, const WeightTuple& a, int n, const LocalRule* rule,
                 std::int64_t budget) {
    if (n < 0) throw ValidationError("level must be nonnegative");
    return nu_vector(sys, a, n, rule, budget).at(static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------
// Block-partition invariant.
// ---------------------------------------------------------------------------
PartitionCertificate mu_invariant(const ExponentSystem& sys, const BoxExponents& b) {
    sys.validate();
    b.validate();
    if (b.shape != sys.shape) throw ValidationError("box shape differs from system shape");

    const Shape& shape = sys.shape;
    const int M = shape.total();
    const int k = shape.parts();
    if (M > 16)
        throw SearchTooLarge("partition invariant limited to 16 coordinates, got " +
                             std::to_string(M));

    // Balance is necessary for any block partition to exist.
    ProblemSpec probe;
    probe.system = sys;
    probe.box = b;
    if (!probe.is_balanced_data())
        throw ValidationError("partition invariant requires a balanced system");

    // Scale gamma_t * b_t to integers.
    Integer D = 1;
    for (const Rational& q : b.b) D = lcm(D, denominator(q));
    std::vector<std::int64_t> wt(M);
    for (int t = 0; t < M; ++t)
        wt[t] = to_int64(numerator(b.b[t] * Rational(sys.gamma[t]) * Rational(D)));

    const std::uint32_t full = (M == 32) ? 0xffffffffu : ((1u << M) - 1u);
    const std::size_t n_masks = static_cast<std::size_t>(full) + 1;

    // Per-mask per-part weighted sums, built incrementally from the lowest bit.
    std::vector<std::int64_t> sums(n_masks * k, 0);
    std::vector<char> balanced(n_masks, 0);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int low = __builtin_ctz(mask);
        const std::uint32_t rest = mask & (mask - 1);
        const int part = shape.part_of(low);
        for (int i = 0; i < k; ++i)
            sums[static_cast<std::size_t>(mask) * k + i] =
                sums[static_cast<std::size_t>(rest) * k + i] + (i == part ? wt[low] : 0);
        bool ok = true;
        const std::int64_t first = sums[static_cast<std::size_t>(mask) * k];
        for (int i = 1; i < k; ++i)
            if (sums[static_cast<std::size_t>(mask) * k + i] != first) { ok = false; break; }
        balanced[mask] = ok && first > 0;
    }

    // Exact-cover DP maximising the number of balanced blocks.
    std::vector<int> dp(n_masks, -1);
    std::vector<std::uint32_t> choice(n_masks, 0);
    dp[0] = 0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const std::uint32_t low_bit = mask & (~mask + 1u);
        for (std::uint32_t S = mask; S; S = (S - 1) & mask) {
            if (!(S & low_bit)) continue;  // canonical: block containing lowest coord
            if (!balanced[S]) continue;
            if (dp[mask ^ S] < 0) continue;
            if (dp[mask ^ S] + 1 > dp[mask]) {
                dp[mask] = dp[mask ^ S] + 1;
                choice[mask] = S;
            }
        }
        if (mask == full) break;
    }

    PartitionCertificate cert;
    cert.mu = dp[full];
    if (cert.mu < 0)
        throw ValidationError("no balanced block partition exists");  // unreachable if balanced
    std::uint32_t mask = full;
    while (mask) {
        const std::uint32_t S = choice[mask];
        cert.block_masks.push_back(S);
        cert.block_values.push_back(Rational(sums[static_cast<std::size_t>(S) * k]) / Rational(D));
        mask ^= S;
    }
    return cert;
}

}  // namespace divlab
