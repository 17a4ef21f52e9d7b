#include "divlab/predict.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/eigen.hpp>
#include <map>

#include "divlab/volume.hpp"

namespace divlab {

namespace {

using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

Integer binom_small(long n, int r) {
    if (r < 0 || n < r) return Integer(0);
    Integer res = 1;
    for (int i = 1; i <= r; ++i) {
        res *= (n - r + i);
        res /= i;
    }
    return res;
}

Real to_real(const Rational& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

Real int_pow(const Real& base, int e) {
    Real r(1);
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

int degree_formula(int m, int k, int ell) {
    if (m < 1 || k < 1 || ell < 1) throw ValidationError("moment parameters must be positive");
    const Integer d =
        ipow(binom_small(ell + m - 1, m - 1), static_cast<unsigned long>(k)) -
        Integer(m - 1) * k - 1;
    if (d > Integer(1) << 30) throw OverflowRisk("log-power does not fit an int");
    return static_cast<int>(to_int64(d));
}

int tau_xi_degree_bound(const std::vector<std::int64_t>& xi, int k) {
    if (xi.empty() || k < 1) throw ValidationError("pattern must be nonempty, k positive");
    std::map<std::int64_t, int> groups;
    for (std::int64_t x : xi) {
        if (x < 1) throw ValidationError("pattern entries must be positive");
        ++groups[x];
    }
    Integer total = 0;
    for (const auto& [value, c] : groups) {
        (void)value;
        total += ipow(Integer(c), static_cast<unsigned long>(k)) - 1 -
                 Integer(k) * (c - 1);
    }
    if (total > Integer(1) << 30) throw OverflowRisk("log-power does not fit an int");
    return static_cast<int>(to_int64(total));
}

TrivialBounds trivial_bounds(const ProblemSpec& spec) {
    spec.validate();
    if (!spec.is_balanced_data())
        throw ValidationError("exponent sandwich requires a balanced system");
    TrivialBounds tb;
    tb.certificate = mu_invariant(spec.system, spec.box);
    tb.lower = Rational(tb.certificate.mu) / Rational(spec.box.denominator_lcm());
    Rational up = spec.box.part_norm(0);
    for (int i = 1; i < spec.system.shape.parts(); ++i)
        up = std::min(up, spec.box.part_norm(i));
    tb.upper = up;
    return tb;
}

AsymptoticPrediction predict(const ProblemSpec& spec, std::optional<WeightTuple> a,
                             const PredictOptions& opts) {
    spec.validate();
    AsymptoticPrediction out;

    if (!a && spec.weights) a = spec.weights;
    if (a) {
        a->validate(spec.system.shape);
        if (!a->strictly_positive())
            throw ValidationError("weights must be strictly positive");
        out.a_used = *a;
    } else {
        const AdmissibleWeight w = find_a(spec.system, spec.box, Integer(0), opts.budget);
        out.a_used = w.a;
        out.a_certified = w.certified;
    }

    out.slice = slice_statistics(spec.system, out.a_used, opts.budget);
    out.kappa = out.slice.kappa;
    out.degree = out.kappa;
    out.lambda = out.a_used.pairing(spec.box.b);
    out.generation =
        check_generation(spec.system, out.a_used, opts.generation_depth, opts.budget);
    const bool balanced = spec.is_balanced_data();
    out.degree_certified = out.generation.generated && balanced;

    if (opts.with_euler) {
        out.euler_factor = euler_product(spec.system, spec.restriction, out.a_used, opts.euler);
        out.euler_computed = true;
    }
    if (opts.with_volume) {
        out.volume = operational_volume(
            spec.system, out.a_used, spec.box,
            opts.s_grid.empty() ? default_s_grid() : opts.s_grid, opts.volume_rel_tol,
            opts.budget);
        out.volume_computed = true;
    }
    if (out.euler_computed && out.volume_computed)
        out.leading = out.euler_factor * out.volume;

    if (balanced && spec.system.shape.total() <= 16) {
        out.partition = mu_invariant(spec.system, spec.box);
        out.lower_exponent =
            Rational(out.partition->mu) / Rational(spec.box.denominator_lcm());
        Rational up = spec.box.part_norm(0);
        for (int i = 1; i < spec.system.shape.parts(); ++i)
            up = std::min(up, spec.box.part_norm(i));
        out.upper_exponent = up;
    }
    return out;
}

ComparisonReport compare(const CensusResult& census, const AsymptoticPrediction& prediction,
                         std::optional<Real> secondary) {
    if (census.rows.empty()) throw ValidationError("census grid is empty");
    ComparisonReport rep;
    const int kappa = prediction.kappa;
    const Real lam = to_real(prediction.lambda);
    const Real q = prediction.leading.mid();

    // Ratio table.
    std::vector<Real> lhs, ys;  // log H and count/H^lambda for the fit
    Integer h_min(0), h_max(0);
    for (const CensusRow& row : census.rows) {
        ComparisonRow out;
        out.H = row.H;
        out.count = row.count;
        const Real h(row.H);
        const Real lh = log(h);
        const Real hpow = exp(lam * lh);
        Real main = q * hpow * int_pow(lh, kappa);
        if (secondary) main += *secondary * hpow;
        out.main_term = main;
        out.ratio = (main != 0) ? Real(Real(row.count) / main) : Real(0);
        rep.rows.push_back(out);
        if (row.H >= 2) {
            lhs.push_back(lh);
            ys.push_back(Real(row.count) / hpow);
        }
        if (h_min == 0 || row.H < h_min) h_min = row.H;
        if (row.H > h_max) h_max = row.H;
    }
    rep.ill_conditioned = h_max < 10 * h_min;

    // Least-squares fit of count/H^lambda against (log H)^j.  When the grid
    // is shorter than the basis, low powers are dropped so the leading
    // coefficient stays identified.
    const int n = static_cast<int>(ys.size());
    rep.fit_coefficients.assign(static_cast<std::size_t>(kappa) + 1, Real(0));
    if (n == 0) return rep;
    const int p = std::min(kappa + 1, n);
    const int j_lo = kappa + 1 - p;
    RMatrix phi(n, p);
    RVector y(n);
    for (int i = 0; i < n; ++i) {
        y(i) = ys[static_cast<std::size_t>(i)];
        for (int j = 0; j < p; ++j)
            phi(i, j) = int_pow(lhs[static_cast<std::size_t>(i)], j_lo + j);
    }
    const RMatrix gram = phi.transpose() * phi;
    const RVector rhs = phi.transpose() * y;
    const RVector beta = gram.fullPivLu().solve(rhs);
    for (int j = 0; j < p; ++j)
        rep.fit_coefficients[static_cast<std::size_t>(j_lo + j)] = beta(j);
    rep.fitted_leading = rep.fit_coefficients.back();
    const RVector resid = y - phi * beta;
    Real ss(0);
    for (int i = 0; i < n; ++i) ss += resid(i) * resid(i);
    rep.residual_rms = sqrt(ss / n);
    return rep;
}

GrowthVerdict classify_growth(const CensusResult& census,
                              const AsymptoticPrediction& prediction) {
    GrowthVerdict v;
    v.lambda = prediction.lambda;
    std::vector<Real> xs, ys;
    for (const CensusRow& row : census.rows) {
        if (row.H < 2 || row.count <= 0) continue;
        const Real lh = log(Real(row.H));
        // Remove the predicted log-power before measuring the exponent.
        ys.push_back(log(Real(row.count)) - prediction.kappa * log(lh));
        xs.push_back(lh);
    }
    if (xs.size() < 2) return v;
    Real xbar(0), ybar(0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<int>(xs.size());
    ybar /= static_cast<int>(xs.size());
    Real sxx(0), sxy(0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx == 0) return v;
    v.slope = sxy / sxx;
    v.applicable = abs(v.slope - to_real(prediction.lambda)) <= Real(3) / Real(20);
    return v;
}

}  // namespace divlab
