// Acceptance gate: every release-blocking requirement is checked here, one
// line of output per criterion.  Tolerances are pinned as named constants;
// any FAIL line flips the exit code to 1.
#include "divlab/census.hpp"
#include "divlab/constants.hpp"
#include "divlab/interval.hpp"
#include "divlab/lattice.hpp"
#include "divlab/model.hpp"
#include "divlab/polytope.hpp"
#include "divlab/predict.hpp"
#include "divlab/problem_io.hpp"
#include "divlab/volume.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace divlab;

namespace {

// Pin the MPFR working precision before the first Real is constructed.
[[maybe_unused]] const unsigned kPrecisionBits = set_working_precision_bits(192);

// ---- pinned tolerances ----------------------------------------------------
constexpr double kFinalDeviationTol = 0.02;   // census vs two-term main term at the top
constexpr double kDecayExponent = -7.0 / 13.0;  // error-term decay rate in X
constexpr double kDecaySlack = 1.25;          // absorbs the log factor of the remainder
constexpr double kEulerWidthTol = 1e-6;       // certified Euler-product width at P = 1e6
constexpr double kVolumeRelTol = 0.01;        // scaled-limit volume anchors
constexpr double kFiberWidthTol = 1e-9;       // irrational fiber measure enclosure
constexpr double kOracleFitTol = 0.05;        // fitted leading vs certified constant
constexpr double kRatioLimitTol = 0.20;       // extrapolated census ratio vs exact limit
constexpr double kMcSigmas = 3.0;             // Monte Carlo agreement band
constexpr double kCensusTimeLimit = 120.0;    // seconds, criterion 1
constexpr double kVolumeTimeLimit = 60.0;     // seconds, criterion 3

int g_failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", n, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemSpec pair_problem() {
    return product_moment_problem(2, 2, {Rational(1), Rational(1)});
}

WeightTuple uniform_weights(const Shape& shape, const Rational& v) {
    WeightTuple a;
    a.shape = shape;
    a.a.assign(shape.total(), v);
    return a;
}

Integer binomial(int n, int r) {
    Integer num = 1, den = 1;
    for (int i = 0; i < r; ++i) {
        num *= n - i;
        den *= i + 1;
    }
    return num / den;
}

std::int64_t floor_div(const Rational& q) {
    return (numerator(q) / denominator(q)).convert_to<std::int64_t>();
}

// Brute-force slice oracle (same contract as enumerate_slice, used nowhere
// else in the library so the two cannot share a bug).
std::vector<std::vector<std::int64_t>> naive_slice(const ExponentSystem& sys,
                                                   const WeightTuple& a) {
    int n = sys.shape.total();
    std::vector<std::int64_t> cap(n);
    for (int t = 0; t < n; ++t) cap[t] = floor_div(Rational(1) / a.a[t]);
    std::vector<std::vector<std::int64_t>> out;
    ExponentVector x;
    x.r.assign(n, 0);
    while (true) {
        Rational w = 0;
        for (int t = 0; t < n; ++t) w += a.a[t] * x.r[t];
        if (w == 1 && !x.is_zero() && in_monoid(sys, x)) out.push_back(x.r);
        int t = n - 1;
        while (t >= 0 && x.r[t] == cap[t]) x.r[t--] = 0;
        if (t < 0) break;
        ++x.r[t];
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- criterion 1: exact census vs the two-term main term -------------------
void criterion1() {
    const std::string what =
        "pair-product census matches the frozen exact counts and tracks the two-term main term";
    try {
        auto t0 = std::chrono::steady_clock::now();
        const long xs[5] = {256, 512, 1024, 2048, 4096};
        const long long frozen[5] = {411968, 1859760, 8310400, 36756784, 161268016};
        const double q = (Interval::from_int(2) / zeta2()).mid_double();
        const double A = constant_A().mid_double();

        bool counts_ok = true;
        double dev[5] = {0, 0, 0, 0, 0};
        std::ostringstream detail;
        for (int i = 0; i < 5; ++i) {
            Integer count = moment_divisor_sieve(2, 2, {Integer(xs[i]), Integer(xs[i])});
            if (count != frozen[i]) {
                counts_ok = false;
                detail << "count(" << xs[i] << ") = " << count << " != " << frozen[i] << "; ";
            }
            double x = static_cast<double>(xs[i]);
            double main = q * x * x * std::log(x) + A * x * x;
            dev[i] = std::abs(count.convert_to<double>() - main) / main;
        }
        // The remainder oscillates, so adjacent grid points need not be
        // ordered; what the error-term exponent guarantees is decay against
        // the first point like (X/X0)^(-7/13), with slack for the log factor.
        bool decay_ok = true;
        for (int i = 1; i < 5; ++i) {
            double cap = dev[0] * std::pow(xs[i] / 256.0, kDecayExponent) * kDecaySlack;
            if (dev[i] > cap) {
                decay_ok = false;
                detail << "deviation at " << xs[i] << " is " << dev[i] << " > cap " << cap
                       << "; ";
            }
        }
        bool final_ok = dev[4] <= kFinalDeviationTol;
        if (!final_ok) detail << "final deviation " << dev[4] << " > " << kFinalDeviationTol << "; ";
        double secs = seconds_since(t0);
        bool time_ok = secs <= kCensusTimeLimit;
        if (!time_ok) detail << "took " << secs << " s > " << kCensusTimeLimit << " s; ";
        if (counts_ok && decay_ok && final_ok && time_ok) {
            std::ostringstream ok;
            ok << "final deviation " << dev[4] << ", " << secs << " s";
            report(1, true, what, ok.str());
        } else {
            report(1, false, what, detail.str());
        }
    } catch (const std::exception& e) {
        report(1, false, what, e.what());
    }
}

// ---- criterion 2: certified Euler products ---------------------------------
void criterion2() {
    const std::string what =
        "certified Euler products of both pair encodings are narrow and bracket 6/pi^2";
    try {
        const Real ref("0.6079271018540266286632767792583658334262");
        ProblemSpec prod = pair_problem();
        Interval a = euler_product(prod.system, prod.restriction,
                                   uniform_weights(prod.system.shape, Rational(1, 2)));
        ProblemSpec pow = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
        Interval b = euler_product(pow.system, pow.restriction, canonical_a(2, 1, 2));
        bool ok = a.width_double() <= kEulerWidthTol && b.width_double() <= kEulerWidthTol &&
                  a.contains(ref) && b.contains(ref);
        std::ostringstream detail;
        detail << "widths " << a.width_double() << ", " << b.width_double();
        report(2, ok, what, detail.str());
    } catch (const std::exception& e) {
        report(2, false, what, e.what());
    }
}

// ---- criterion 3: geometry oracles ------------------------------------------
void criterion3() {
    const std::string what = "volume oracles reproduce the frozen geometric factors";
    try {
        auto t0 = std::chrono::steady_clock::now();
        ProblemSpec prod = pair_problem();
        WeightTuple pa = uniform_weights(prod.system.shape, Rational(1, 2));
        Interval v22 = operational_volume(prod.system, pa, prod.box);
        ProblemSpec pow = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
        WeightTuple wa = canonical_a(2, 1, 2);
        Interval v212 = operational_volume(pow.system, wa, pow.box);
        Interval f22 = fiber_volume_euclidean(prod.system, pa, prod.box);
        Interval f212 = fiber_volume_euclidean(pow.system, wa, pow.box);
        // The enclosure is tighter than the 40-digit reference, so compare
        // midpoints rather than membership.
        const Real root6over2("1.224744871391589049098642037352945695983");

        bool ok = std::abs(v22.mid_double() - 2.0) <= 2.0 * kVolumeRelTol &&
                  v22.contains(Rational(2)) &&
                  std::abs(v212.mid_double() - 1.0) <= kVolumeRelTol &&
                  v212.contains(Rational(1)) && f22.contains(Rational(2)) &&
                  f22.width() == 0 && abs(f212.mid() - root6over2) < Real(1e-38) &&
                  f212.width_double() <= kFiberWidthTol;
        double secs = seconds_since(t0);
        bool time_ok = secs <= kVolumeTimeLimit;
        std::ostringstream detail;
        detail << "scaled limits " << v22.mid_double() << ", " << v212.mid_double()
               << "; fibers " << f22.mid_double() << ", " << f212.mid_double() << "; " << secs
               << " s";
        report(3, ok && time_ok, what, detail.str());
    } catch (const std::exception& e) {
        report(3, false, what, e.what());
    }
}

// ---- criterion 4: independent square-pair oracle ----------------------------
void criterion4() {
    const std::string what =
        "squarefree-kernel oracle matches the power sieve and fits the predicted constant";
    try {
        bool equal_ok = true;
        std::ostringstream detail;
        auto check_x = [&](long x) {
            Integer lhs = square_product_pair_count(x);
            Integer rhs = moment_power_sieve(2, 1, 2, {Integer(x), Integer(x)});
            if (lhs != rhs) {
                equal_ok = false;
                detail << "mismatch at X = " << x << ": " << lhs << " vs " << rhs << "; ";
            }
        };
        for (long x = 1; x <= 1000; ++x) check_x(x);
        for (long x : {2048L, 5000L, 9999L, 10000L}) check_x(x);

        // Fast oracle census to X = 1e6, fitted against the predicted shape.
        CensusResult census;
        for (long x : {62500L, 250000L, 1000000L}) {
            CensusRow row;
            row.H = x;
            row.count = square_product_pair_count(x);
            row.method = "squarefree-kernel";
            census.rows.push_back(row);
        }
        ProblemSpec pow = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
        PredictOptions opts;
        opts.with_euler = false;  // only lambda and kappa feed the fit
        opts.with_volume = false;
        AsymptoticPrediction pred = predict(pow, canonical_a(2, 1, 2), opts);
        ComparisonReport rep = compare(census, pred);
        double fitted = static_cast<double>(rep.fitted_leading);
        const double target = 0.6079271018540266;
        double rel = std::abs(fitted - target) / target;
        bool fit_ok = rel <= kOracleFitTol && !rep.ill_conditioned;
        detail << "fitted leading " << fitted << " (rel " << rel << ")";
        report(4, equal_ok && fit_ok, what, detail.str());
    } catch (const std::exception& e) {
        report(4, false, what, e.what());
    }
}

// ---- criterion 5: closed-form log-powers ------------------------------------
void criterion5() {
    const std::string what = "slice statistics reproduce the closed-form log-powers";
    try {
        struct Row { int m, k, ell, kappa; };
        const Row rows[5] = {{2, 2, 1, 1}, {3, 2, 1, 4}, {2, 3, 1, 4}, {2, 1, 2, 1}, {3, 1, 3, 7}};
        bool ok = true;
        std::ostringstream detail;
        for (const Row& r : rows) {
            ProblemSpec p = power_moment_problem(r.m, r.k, r.ell,
                                                 std::vector<Rational>(r.m, Rational(1)));
            SliceStatistics st = slice_statistics(p.system, canonical_a(r.m, r.k, r.ell));
            Integer card = 1;
            for (int i = 0; i < r.k; ++i) card *= binomial(r.ell + r.m - 1, r.m - 1);
            bool here = st.kappa == r.kappa && st.kappa == degree_formula(r.m, r.k, r.ell) &&
                        Integer(st.slice.size()) == card &&
                        st.rank == (r.m - 1) * r.k + 1;
            if (!here) {
                ok = false;
                detail << "(" << r.m << "," << r.k << "," << r.ell << ") got kappa " << st.kappa
                       << " slice " << st.slice.size() << "; ";
            }
        }
        if (ok) detail << "log-powers {1,4,4,1,7} as expected";
        report(5, ok, what, detail.str());
    } catch (const std::exception& e) {
        report(5, false, what, e.what());
    }
}

// ---- criterion 6: coprimality ratios ----------------------------------------
void criterion6() {
    const std::string what =
        "coprimality factors are exact and the census ratio extrapolates to the limit";
    try {
        ProblemSpec prod = pair_problem();
        WeightTuple a = uniform_weights(prod.system.shape, Rational(1, 2));
        RestrictionSpec at2, at3;
        LocalRule rule;
        rule.kind = RuleKind::ZeroCoords;
        for (int t = 0; t < 4; ++t) rule.zero_coords.push_back(t);
        rule.p = 2;
        at2.rules.push_back(rule);
        rule.p = 3;
        at3.rules.push_back(rule);
        RestrictionRatio r2 = restriction_ratio(prod.system, a, at2);
        RestrictionRatio r3 = restriction_ratio(prod.system, a, at3);
        bool exact_ok = r2.exact && *r2.exact == Rational(1, 12) && r3.exact &&
                        *r3.exact == Rational(2, 9);

        // Census ratios along the doubling grid approach 1/12 from above but
        // only at speed 1/log X; one elimination step in 1/log X removes the
        // first-order term before comparing with the exact limit.
        const long xs[5] = {256, 512, 1024, 2048, 4096};
        double ratio[5], lg[5];
        bool trend_ok = true;
        for (int i = 0; i < 5; ++i) {
            Integer num = restricted_moment(2, xs[i]);
            Integer den = moment_divisor_sieve(2, 2, {Integer(xs[i]), Integer(xs[i])});
            ratio[i] = num.convert_to<double>() / den.convert_to<double>();
            lg[i] = std::log(static_cast<double>(xs[i]));
            if (i > 0 && ratio[i] >= ratio[i - 1]) trend_ok = false;
        }
        double extrapolated = (ratio[4] * lg[4] - ratio[3] * lg[3]) / (lg[4] - lg[3]);
        const double limit = 1.0 / 12.0;
        double rel = std::abs(extrapolated - limit) / limit;
        bool limit_ok = rel <= kRatioLimitTol;
        std::ostringstream detail;
        detail << "extrapolated ratio " << extrapolated << " vs 1/12 (rel " << rel << ")";
        if (!trend_ok) detail << "; ratios not monotone";
        report(6, exact_ok && trend_ok && limit_ok, what, detail.str());
    } catch (const std::exception& e) {
        report(6, false, what, e.what());
    }
}

// ---- criterion 7: signed singular counts ------------------------------------
void criterion7() {
    const std::string what = "signed singular-matrix counts and their zero-entry split";
    try {
        bool ok = singular_matrix_count(1) == 33 && egyptian_singular_count(1) == 8;
        std::ostringstream detail;
        // Identity against the pair moment: the residual after removing the
        // eight signed copies must be exactly the zero-entry contribution,
        // bounded by 9H.
        for (long h : {1L, 10L, 100L, 1000L}) {
            Integer d = singular_matrix_count(h);
            Integer m = moment_divisor_sieve(2, 2, {Integer(h), Integer(h)});
            Integer slack = d - 8 * m - 16 * Integer(h) * h;
            if (slack < 0 || slack > 9 * Integer(h)) {
                ok = false;
                detail << "slack at H = " << h << " is " << slack << "; ";
            }
        }
        // Direct four-loop enumeration splits the count by zero usage.
        for (long h : {1L, 2L, 3L}) {
            Integer all = 0, nonzero = 0;
            for (long a = -h; a <= h; ++a)
                for (long b = -h; b <= h; ++b)
                    for (long c = -h; c <= h; ++c)
                        for (long d = -h; d <= h; ++d)
                            if (a * d == b * c) {
                                ++all;
                                if (a && b && c && d) ++nonzero;
                            }
            if (singular_matrix_count(h) != all || egyptian_singular_count(h) != nonzero) {
                ok = false;
                detail << "split mismatch at H = " << h << "; ";
            }
        }
        if (ok) detail << "counts 33 / 8 at H = 1; slack within 9H up to H = 1000";
        report(7, ok, what, detail.str());
    } catch (const std::exception& e) {
        report(7, false, what, e.what());
    }
}

// ---- criterion 8: property suites --------------------------------------------
void criterion8() {
    const std::string what =
        "property suites: slices, box moments, engine agreement, threading, Monte Carlo";
    try {
        bool ok = true;
        std::ostringstream detail;

        // (a) 200 random systems: recursive slice enumeration == box scan.
        {
            std::mt19937_64 rng(20240814);
            std::uniform_int_distribution<int> parts_d(1, 3), size_d(1, 3), g_d(1, 3);
            std::uniform_int_distribution<int> num_d(1, 3), den_d(1, 4);
            int done = 0, bad = 0;
            while (done < 200) {
                int k = parts_d(rng);
                ExponentSystem sys;
                std::vector<int> sizes;
                std::vector<std::int64_t> gamma;
                for (int i = 0; i < k; ++i) {
                    int m = size_d(rng);
                    sizes.push_back(m);
                    for (int j = 0; j < m; ++j) gamma.push_back(g_d(rng));
                }
                sys.shape = Shape(sizes);
                sys.gamma = gamma;
                WeightTuple a;
                a.shape = sys.shape;
                double cells = 1;
                for (int t = 0; t < sys.shape.total(); ++t) {
                    Rational q(num_d(rng), den_d(rng));
                    if (q > 1) q = 1;
                    a.a.push_back(q);
                    cells *= 1.0 + static_cast<double>(floor_div(Rational(1) / q));
                }
                if (cells > 200000) continue;
                ++done;
                auto fast = enumerate_slice(sys, a);
                std::vector<std::vector<std::int64_t>> got;
                for (const auto& v : fast) got.push_back(v.r);
                std::sort(got.begin(), got.end());
                if (got != naive_slice(sys, a)) ++bad;
            }
            if (bad) {
                ok = false;
                detail << bad << " slice mismatches; ";
            }
        }

        // (b) 50 random boxes: the first moment counts the box exactly.
        {
            std::mt19937_64 rng(814);
            std::uniform_int_distribution<long> xd(1, 40);
            std::uniform_int_distribution<int> md(1, 3);
            for (int trial = 0; trial < 50; ++trial) {
                int m = md(rng);
                std::vector<Integer> X;
                Integer prod = 1;
                for (int i = 0; i < m; ++i) {
                    X.emplace_back(xd(rng));
                    prod *= X.back();
                }
                if (moment_divisor_sieve(m, 1, X) != prod) {
                    ok = false;
                    detail << "box-count mismatch; ";
                    break;
                }
            }
        }

        // (c) brute-force energy == sieves on the matching encodings.
        {
            for (long h : {50L, 200L}) {
                ProblemSpec p22 = product_moment_problem(2, 2, {Rational(1), Rational(1)});
                if (energy_bruteforce(p22, h) !=
                    moment_divisor_sieve(2, 2, {Integer(h), Integer(h)})) {
                    ok = false;
                    detail << "pair energy/sieve mismatch at H = " << h << "; ";
                }
                ProblemSpec p212 = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
                if (energy_bruteforce(p212, h) !=
                    moment_power_sieve(2, 1, 2, {Integer(h), Integer(h)})) {
                    ok = false;
                    detail << "square-pair energy/sieve mismatch at H = " << h << "; ";
                }
            }
            ProblemSpec p32 =
                product_moment_problem(3, 2, {Rational(1), Rational(1), Rational(1)});
            if (energy_bruteforce(p32, 30) !=
                moment_divisor_sieve(3, 2, {Integer(30), Integer(30), Integer(30)})) {
                ok = false;
                detail << "triple energy/sieve mismatch; ";
            }
        }

        // (d) thread counts 1/2/8 give bit-identical results.
        {
            CountOptions t1, t2, t8;
            t2.threads = 2;
            t8.threads = 8;
            std::vector<Integer> x300 = {Integer(300), Integer(300)};
            Integer base = moment_divisor_sieve(2, 2, x300, t1);
            if (moment_divisor_sieve(2, 2, x300, t2) != base ||
                moment_divisor_sieve(2, 2, x300, t8) != base) {
                ok = false;
                detail << "sieve thread divergence; ";
            }
            Integer s = singular_matrix_count(150, t1);
            if (singular_matrix_count(150, t2) != s || singular_matrix_count(150, t8) != s) {
                ok = false;
                detail << "singular-count thread divergence; ";
            }
            ProblemSpec pp = pair_problem();
            Integer e = energy_bruteforce(pp, 120, t1);
            if (energy_bruteforce(pp, 120, t8) != e) {
                ok = false;
                detail << "energy thread divergence; ";
            }
        }

        // (e) Monte Carlo bands contain the exact volumes (1e6 samples each).
        {
            HPolytope simplex;
            simplex.A = MatrixXq::Constant(1, 3, Rational(1));
            simplex.ub = VectorXq::Constant(1, Rational(1));
            MonteCarloVolume mc = volume_monte_carlo(simplex, 1'000'000);
            if (std::abs(mc.estimate - 1.0 / 6.0) > kMcSigmas * mc.std_error) {
                ok = false;
                detail << "simplex MC off: " << mc.estimate << "; ";
            }
            ProblemSpec pp = pair_problem();
            WeightTuple pa = uniform_weights(pp.system.shape, Rational(1, 2));
            HPolytope down = build_downset(pp.system, pa, pp.box);
            Rational exact = triangulate(vertices_of(down)).volume();
            MonteCarloVolume mc2 = volume_monte_carlo(down, 1'000'000);
            if (std::abs(mc2.estimate - exact.convert_to<double>()) >
                kMcSigmas * mc2.std_error) {
                ok = false;
                detail << "down-set MC off: " << mc2.estimate << "; ";
            }
            MonteCarloVolume mc3 = volume_monte_carlo(build_fiber(pp.system, pa, pp.box),
                                                      1'000'000);
            if (std::abs(mc3.estimate - 2.0) > std::max(kMcSigmas * mc3.std_error, 1e-9)) {
                ok = false;
                detail << "fiber MC off: " << mc3.estimate << "; ";
            }
        }

        if (ok) detail << "all five suites passed";
        report(8, ok, what, detail.str());
    } catch (const std::exception& e) {
        report(8, false, what, e.what());
    }
}

// ---- criterion 9: generation certificates ------------------------------------
void criterion9() {
    const std::string what =
        "generation certificates: canonical weights pass, skew weights yield the frozen counterexample";
    try {
        bool ok = true;
        std::ostringstream detail;
        for (auto [m, k, ell] : {std::tuple{2, 2, 1}, {2, 1, 2}, {3, 2, 1}}) {
            ProblemSpec p = power_moment_problem(m, k, ell,
                                                 std::vector<Rational>(m, Rational(1)));
            GenerationCertificate cert = check_generation(p.system, canonical_a(m, k, ell), 4);
            if (!cert.generated) {
                ok = false;
                detail << "(" << m << "," << k << "," << ell << ") not generated; ";
            }
        }
        ProblemSpec pp = pair_problem();
        WeightTuple skew;
        skew.shape = pp.system.shape;
        skew.a = {Rational(1), Rational(1, 2), Rational(1, 2), Rational(1, 2)};
        GenerationCertificate cert = check_generation(pp.system, skew, 2);
        bool counter_ok = !cert.generated && cert.counterexample.has_value() &&
                          cert.counterexample->r == std::vector<std::int64_t>{1, 0, 1, 0};
        if (!counter_ok) {
            ok = false;
            detail << "skew counterexample missing or wrong; ";
        } else {
            detail << "counterexample " << cert.counterexample->str();
        }
        report(9, ok, what, detail.str());
    } catch (const std::exception& e) {
        report(9, false, what, e.what());
    }
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
