#include "divlab/volume.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace divlab {

namespace {

Rational weight_box_pairing(const WeightTuple& a, const BoxExponents& b) {
    Rational s = 0;
    for (std::size_t t = 0; t < a.a.size(); ++t) s += a.a[t] * b.b[t];
    return s;
}

std::vector<ExponentVector> slice_or_throw(const ExponentSystem& sys, const WeightTuple& a,
                                           std::int64_t budget) {
    if (!a.strictly_positive())
        throw ValidationError("volume oracles need strictly positive weights");
    auto slice = enumerate_slice(sys, a, Rational(1), budget);
    if (slice.empty())
        throw UnboundedOrDegenerate("weight-one slice is empty; no polytope to measure");
    return slice;
}

// ---------------------------------------------------------------------------
// Divided differences of exp at the nodes s*z_0, ..., s*z_D for a doubling
// ladder of scale factors, via the bidiagonal matrix whose function values
// encode divided differences.  Everything is nonnegative, so directed
// interval arithmetic tracks the value without cancellation; the Taylor
// truncation enters as a one-sided [0, tail] inflation.
// ---------------------------------------------------------------------------
using IMatrix = std::vector<std::vector<Interval>>;  // upper triangular, dense rows

IMatrix multiply_upper(const IMatrix& x, const IMatrix& y) {
    const int n = static_cast<int>(x.size());
    IMatrix out(n, std::vector<Interval>(n, Interval::exact(Real(0))));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Interval acc = Interval::exact(Real(0));
            for (int k = i; k <= j; ++k) acc = acc + x[i][k] * y[k][j];
            out[i][j] = acc;
        }
    return out;
}

// exp of the upper-bidiagonal node matrix (diagonal = nodes, superdiagonal
// = 1) by scaling and squaring with a rigorous truncation bound.
IMatrix exp_node_matrix(const std::vector<Rational>& nodes) {
    const int n = static_cast<int>(nodes.size());

    Rational max_node = 0;
    for (const Rational& z : nodes) {
        if (z < 0) throw ValidationError("node matrix requires nonnegative nodes");
        max_node = std::max(max_node, z);
    }
    // Scale so the row-sum norm (<= max node + 1) drops below 1/2.
    int shifts = 0;
    Rational norm = max_node + 1;
    while (norm > Rational(1, 2)) {
        norm /= 2;
        ++shifts;
    }
    const Rational scale = Rational(1) / (Integer(1) << shifts);

    // B = scaled matrix, entries exact dyadic rationals.
    IMatrix base(n, std::vector<Interval>(n, Interval::exact(Real(0))));
    for (int i = 0; i < n; ++i) {
        base[i][i] = Interval::from_rational(nodes[i] * scale);
        if (i + 1 < n) base[i][i + 1] = Interval::from_rational(scale);
    }

    // Taylor sum I + B + B^2/2! + ... + B^N/N!.
    constexpr int kTerms = 28;
    IMatrix sum(n, std::vector<Interval>(n, Interval::exact(Real(0))));
    IMatrix term = sum;
    for (int i = 0; i < n; ++i) {
        sum[i][i] = Interval::exact(Real(1));
        term[i][i] = Interval::exact(Real(1));
    }
    for (int k = 1; k <= kTerms; ++k) {
        // term <- term * B / k; B is bidiagonal so each entry touches two.
        IMatrix next(n, std::vector<Interval>(n, Interval::exact(Real(0))));
        const Interval inv_k = Interval::from_rational(Rational(1, k));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Interval acc = term[i][j] * base[j][j];
                if (j > i) acc = acc + term[i][j - 1] * base[j - 1][j];
                next[i][j] = acc * inv_k;
            }
        term = std::move(next);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) sum[i][j] = sum[i][j] + term[i][j];
    }
    // Entrywise tail: sum_{k>N} (1/2)^k / k! <= (1/2)^{N+1}/(N+1)! * 1/(1 - 1/(2(N+2))).
    Real tail_hi = Real(0.5);
    mpfr_pow_ui(tail_hi.backend().data(), tail_hi.backend().data(), kTerms + 1, MPFR_RNDU);
    Real fact(1);
    for (int k = 2; k <= kTerms + 1; ++k)
        mpfr_mul_ui(fact.backend().data(), fact.backend().data(), k, MPFR_RNDD);
    mpfr_div(tail_hi.backend().data(), tail_hi.backend().data(), fact.backend().data(),
             MPFR_RNDU);
    mpfr_mul_ui(tail_hi.backend().data(), tail_hi.backend().data(), 2, MPFR_RNDU);
    const Interval tail = Interval::from_endpoints(Real(0), tail_hi);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) sum[i][j] = sum[i][j] + tail;

    for (int s = 0; s < shifts; ++s) sum = multiply_upper(sum, sum);
    return sum;
}

// Divided difference [s*z_0, ..., s*z_D]exp for s = s0 * 2^level,
// level = 0..levels-1.  Doubling the nodes conjugates the node matrix into
// the square of the previous one up to the diagonal similarity
// diag(2^i), which contributes 2^{-D} on the corner entry.
std::vector<Interval> divided_difference_ladder(const std::vector<Rational>& base_nodes,
                                                int levels) {
    const int n = static_cast<int>(base_nodes.size());
    const int D = n - 1;
    std::vector<Interval> out;
    IMatrix power = exp_node_matrix(base_nodes);
    Interval corner_scale = Interval::exact(Real(1));
    const Interval half_pow = Interval::from_rational(Rational(1, Integer(1) << D));
    for (int level = 0; level < levels; ++level) {
        if (level > 0) {
            power = multiply_upper(power, power);
            corner_scale = corner_scale * half_pow;
        }
        out.push_back(power[0][n - 1] * corner_scale);
    }
    return out;
}

bool is_doubling(const std::vector<Rational>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] != grid[i - 1] * 2) return false;
    return true;
}

}  // namespace

HPolytope build_downset(const ExponentSystem& sys, const WeightTuple& a,
                        const BoxExponents& b, std::int64_t budget) {
    auto slice = slice_or_throw(sys, a, budget);
    const int rows = sys.shape.total();
    const int cols = static_cast<int>(slice.size());
    HPolytope poly;
    poly.A.resize(rows, cols);
    poly.ub.resize(rows);
    for (int t = 0; t < rows; ++t) {
        for (int c = 0; c < cols; ++c) poly.A(t, c) = Rational(slice[c].r[t]);
        poly.ub(t) = b.b[t];
    }
    return poly;
}

FiberPolytope build_fiber(const ExponentSystem& sys, const WeightTuple& a,
                          const BoxExponents& b, std::int64_t budget) {
    HPolytope down = build_downset(sys, a, b, budget);
    return FiberPolytope{std::move(down.A), std::move(down.ub)};
}

Interval downset_exponential_integral(const Triangulation& tri, const Rational& s) {
    // Per simplex: |det| * [s*z_0, ..., s*z_D]exp with z_i = sum of vertex i.
    Interval total = Interval::exact(Real(0));
    for (std::size_t idx = 0; idx < tri.simplices.size(); ++idx) {
        std::vector<Rational> nodes;
        for (int v : tri.simplices[idx]) {
            Rational z = 0;
            for (int j = 0; j < tri.points[v].size(); ++j) z += tri.points[v](j);
            nodes.push_back(z * s);
        }
        Interval dd = divided_difference_ladder(nodes, 1)[0];
        total = total + Interval::from_rational(tri.absdets[idx]) * dd;
    }
    return total;
}

Interval operational_volume(const ExponentSystem& sys, const WeightTuple& a,
                            const BoxExponents& b, const std::vector<Rational>& s_grid,
                            double rel_tol, std::int64_t budget) {
    if (s_grid.empty()) throw ValidationError("operational volume needs a nonempty s grid");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (s_grid[i] <= 0) throw ValidationError("s grid entries must be positive");
        if (i > 0 && s_grid[i] <= s_grid[i - 1])
            throw ValidationError("s grid must be strictly increasing");
    }

    HPolytope down = build_downset(sys, a, b, budget);
    auto verts = vertices_of(down);
    Triangulation tri = triangulate(verts);

    const auto slice = enumerate_slice(sys, a, Rational(1), budget);
    const int rank = rank_of(slice);
    const Rational lambda = weight_box_pairing(a, b);
    const int n = static_cast<int>(s_grid.size());

    // I(s) on the grid.  A doubling grid reuses each simplex's matrix
    // exponential across all scales; otherwise recompute per scale.
    std::vector<Interval> integral(n, Interval::exact(Real(0)));
    if (is_doubling(s_grid)) {
        for (std::size_t idx = 0; idx < tri.simplices.size(); ++idx) {
            std::vector<Rational> nodes;
            for (int v : tri.simplices[idx]) {
                Rational z = 0;
                for (int j = 0; j < tri.points[v].size(); ++j) z += tri.points[v](j);
                nodes.push_back(z * s_grid[0]);
            }
            auto ladder = divided_difference_ladder(nodes, n);
            const Interval det = Interval::from_rational(tri.absdets[idx]);
            for (int i = 0; i < n; ++i) integral[i] = integral[i] + det * ladder[i];
        }
    } else {
        for (int i = 0; i < n; ++i) integral[i] = downset_exponential_integral(tri, s_grid[i]);
    }

    // F(s) = s^rank * exp(-lambda s) * I(s).
    std::vector<Interval> f(n, Interval::exact(Real(0)));
    for (int i = 0; i < n; ++i) {
        Interval s_iv = Interval::from_rational(s_grid[i]);
        Interval damp = exp(Interval::from_rational(-lambda * s_grid[i]));
        f[i] = pow_ui(s_iv, static_cast<unsigned>(rank)) * damp * integral[i];
    }

    // Neville extrapolation of the 1/s expansion to 1/s = 0.
    std::vector<std::vector<Interval>> t(n);
    for (int i = 0; i < n; ++i) {
        t[i].assign(i + 1, Interval::exact(Real(0)));
        t[i][0] = f[i];
        for (int j = 1; j <= i; ++j) {
            const Rational factor = s_grid[i] / s_grid[i - j] - 1;
            t[i][j] = t[i][j - 1] +
                      (t[i][j - 1] - t[i - 1][j - 1]) / Interval::from_rational(factor);
        }
    }

    if (n == 1) return t[0][0];

    const Interval last = t[n - 1][n - 1];
    const Interval prev = t[n - 2][n - 2];
    Real spread = last.mid() - prev.mid();
    mpfr_abs(spread.backend().data(), spread.backend().data(), MPFR_RNDU);
    Real scale_ref = last.mid();
    mpfr_abs(scale_ref.backend().data(), scale_ref.backend().data(), MPFR_RNDU);
    if (scale_ref < Real(1)) scale_ref = Real(1);
    if (spread > Real(rel_tol) * scale_ref)
        throw ExtrapolationUnstable("final extrapolants differ by " + spread.str(6) +
                                    " (relative tolerance " + std::to_string(rel_tol) + ")");

    Interval result = Interval::hull(last, prev);
    Real lo(0), hi(0);
    mpfr_sub(lo.backend().data(), result.lo().backend().data(), spread.backend().data(),
             MPFR_RNDD);
    mpfr_add(hi.backend().data(), result.hi().backend().data(), spread.backend().data(),
             MPFR_RNDU);
    return Interval::from_endpoints(lo, hi);
}

Interval fiber_volume_euclidean(const ExponentSystem& sys, const WeightTuple& a,
                                const BoxExponents& b, std::int64_t budget) {
    FiberPolytope fiber = build_fiber(sys, a, b, budget);
    auto verts = vertices_of(fiber);
    if (verts.empty()) return Interval::exact(Real(0));  // infeasible equalities

    AffineChart chart = affine_chart(verts);
    if (chart.affine_dim == 0) return Interval::exact(Real(1));  // single point

    Triangulation tri = triangulate(chart.coords);
    const Rational chart_volume = tri.volume();
    const Rational squared = chart_volume * chart_volume * chart.gram_det;
    if (auto root = exact_sqrt(squared)) return Interval::from_rational(*root);
    return sqrt(Interval::from_rational(squared));
}

namespace {

double to_double(const Rational& q) { return q.convert_to<double>(); }

MonteCarloVolume finish_estimate(double cell_volume, std::int64_t hits,
                                 std::int64_t samples) {
    MonteCarloVolume mc;
    mc.samples = samples;
    mc.hits = hits;
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    mc.estimate = cell_volume * p;
    mc.std_error = cell_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    mc.band = Interval::from_endpoints(Real(mc.estimate - 3 * mc.std_error),
                                       Real(mc.estimate + 3 * mc.std_error));
    return mc;
}

// Deterministic uniform double in [0,1) from the raw 64-bit stream.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

MonteCarloVolume volume_monte_carlo(const HPolytope& poly, std::int64_t samples,
                                    std::uint64_t seed) {
    if (samples <= 0) throw ValidationError("sample count must be positive");
    const int d = poly.dim();
    VectorXq ub = coordinate_bounds(poly);

    std::vector<double> box(d);
    double cell = 1.0;
    for (int j = 0; j < d; ++j) {
        box[j] = to_double(ub(j));
        cell *= box[j];
    }
    const int rows = static_cast<int>(poly.A.rows());
    std::vector<std::vector<double>> aa(rows, std::vector<double>(d));
    std::vector<double> bb(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < d; ++j) aa[i][j] = to_double(poly.A(i, j));
        bb[i] = to_double(poly.ub(i));
    }

    std::mt19937_64 rng(seed);
    std::vector<double> x(d);
    std::int64_t hits = 0;
    for (std::int64_t it = 0; it < samples; ++it) {
        for (int j = 0; j < d; ++j) x[j] = unit_double(rng) * box[j];
        bool inside = true;
        for (int i = 0; i < rows && inside; ++i) {
            double s = 0;
            for (int j = 0; j < d; ++j) s += aa[i][j] * x[j];
            inside = s <= bb[i];
        }
        if (inside) ++hits;
    }
    return finish_estimate(cell, hits, samples);
}

MonteCarloVolume volume_monte_carlo(const FiberPolytope& poly, std::int64_t samples,
                                    std::uint64_t seed) {
    if (samples <= 0) throw ValidationError("sample count must be positive");
    auto verts = vertices_of(poly);
    MonteCarloVolume mc;
    if (verts.empty()) {
        mc.samples = samples;
        mc.band = Interval::exact(Real(0));
        return mc;
    }
    AffineChart chart = affine_chart(verts);
    const int kappa = chart.affine_dim;
    if (kappa == 0) {
        mc.samples = samples;
        mc.hits = samples;
        mc.estimate = 1.0;
        mc.band = Interval::exact(Real(1));
        return mc;
    }

    // Bounding box in chart coordinates (the hull of the vertex coords).
    std::vector<double> lo(kappa), hi(kappa);
    for (int j = 0; j < kappa; ++j) {
        Rational mn = chart.coords[0](j), mx = chart.coords[0](j);
        for (const auto& u : chart.coords) {
            mn = std::min(mn, u(j));
            mx = std::max(mx, u(j));
        }
        lo[j] = to_double(mn);
        hi[j] = to_double(mx);
    }
    double cell = 1.0;
    for (int j = 0; j < kappa; ++j) cell *= hi[j] - lo[j];

    const int d = static_cast<int>(chart.origin.size());
    std::vector<double> origin(d);
    std::vector<std::vector<double>> basis(d, std::vector<double>(kappa));
    for (int t = 0; t < d; ++t) {
        origin[t] = to_double(chart.origin(t));
        for (int j = 0; j < kappa; ++j) basis[t][j] = to_double(chart.basis(t, j));
    }

    std::mt19937_64 rng(seed);
    std::vector<double> u(kappa);
    std::int64_t hits = 0;
    for (std::int64_t it = 0; it < samples; ++it) {
        for (int j = 0; j < kappa; ++j) u[j] = lo[j] + unit_double(rng) * (hi[j] - lo[j]);
        bool inside = true;
        for (int t = 0; t < d && inside; ++t) {
            double v = origin[t];
            for (int j = 0; j < kappa; ++j) v += basis[t][j] * u[j];
            inside = v >= 0.0;
        }
        if (inside) ++hits;
    }
    mc = finish_estimate(cell, hits, samples);
    const double gram = std::sqrt(to_double(chart.gram_det));
    mc.estimate *= gram;
    mc.std_error *= gram;
    mc.band = Interval::from_endpoints(Real(mc.estimate - 3 * mc.std_error),
                                       Real(mc.estimate + 3 * mc.std_error));
    return mc;
}

BirkhoffReport birkhoff_consistency(int m) {
    if (m != 2 && m != 3)
        throw ValidationError("doubly-stochastic consistency check supports m in {2, 3}");

    // Two all-ones parts of size m, unit box, weights 1/2 everywhere.
    Shape shape(std::vector<int>{m, m});
    ExponentSystem sys{shape, std::vector<std::int64_t>(2 * m, 1)};
    BoxExponents box{shape, std::vector<Rational>(2 * m, Rational(1))};
    WeightTuple half{shape, std::vector<Rational>(2 * m, Rational(1, 2))};

    BirkhoffReport report;
    report.m = m;
    report.operational = operational_volume(sys, half, box);

    Integer binom = 1;
    for (int i = 0; i < m - 1; ++i) binom = binom * (2 * (m - 1) - i) / (i + 1);
    report.conversion = Rational(ipow(Integer(m), m - 1), binom);
    report.implied_bm = report.operational * Interval::from_rational(report.conversion);
    return report;
}

}  // namespace divlab
