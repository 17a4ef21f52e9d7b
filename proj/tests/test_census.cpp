// Exact counting engines.  Small values are frozen against hand enumeration
// and an independent reference implementation; the different engines are
// cross-checked against each other on overlapping inputs; threading and
// segmentation must never change a count.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divlab/census.hpp"
#include "divlab/model.hpp"
#include "divlab/problem_io.hpp"

#include <map>
#include <random>

using namespace divlab;

namespace {

ProblemSpec pair_problem() {
    return parse_problem(R"({
      "parts": [ {"gamma": [1,1], "b": ["1","1"]},
                 {"gamma": [1,1], "b": ["1","1"]} ],
      "balanced": true
    })");
}

ProblemSpec square_pair_problem() {
    return parse_problem(R"({
      "parts": [ {"gamma": [1,1], "b": ["1","1"]},
                 {"gamma": [2],   "b": ["1"]} ],
      "balanced": true
    })");
}

std::vector<Integer> box(std::initializer_list<long> xs) {
    std::vector<Integer> out;
    for (long x : xs) out.emplace_back(x);
    return out;
}

// Reference divisor-moment: tau_m via recursive divisor loops into a map.
Integer slow_moment(int m, int k, const std::vector<Integer>& X) {
    std::map<Integer, Integer> tau;
    std::vector<Integer> d(m, 1);
    // Recursive enumeration of all m-tuples within the box.
    auto rec = [&](auto&& self, int level, Integer prod) -> void {
        if (level == m) {
            ++tau[prod];
            return;
        }
        for (Integer v = 1; v <= X[level]; ++v) self(self, level + 1, prod * v);
    };
    rec(rec, 0, 1);
    Integer total = 0;
    for (const auto& [n, t] : tau) {
        Integer p = 1;
        for (int i = 0; i < k; ++i) p *= t;
        total += p;
    }
    return total;
}

}  // namespace

TEST_CASE("box edges are exact floor powers") {
    BoxExponents b;
    b.shape = Shape({1, 1});
    b.b = {Rational(1, 2), Rational(3, 2)};
    auto e16 = box_edges(b, 16);
    CHECK(e16[0] == 4);
    CHECK(e16[1] == 64);
    auto e15 = box_edges(b, 15);
    CHECK(e15[0] == 3);   // floor(sqrt(15))
    CHECK(e15[1] == 58);  // floor(15^1.5) = floor(58.09...)
    BoxExponents unit;
    unit.shape = Shape({2});
    unit.b = {Rational(1), Rational(2)};
    auto e10 = box_edges(unit, 10);
    CHECK(e10[0] == 10);
    CHECK(e10[1] == 100);
}

TEST_CASE("energy counts on the documented examples") {
    CHECK(energy_bruteforce(pair_problem(), 2) == 6);
    CHECK(energy_bruteforce(pair_problem(), 4) == 32);
    CHECK(energy_bruteforce(square_pair_problem(), 4) == 6);
    ProblemSpec diag = parse_problem(R"({
      "parts": [ {"gamma": [1], "b": ["1"]}, {"gamma": [1], "b": ["1"]} ],
      "balanced": true
    })");
    for (long H : {1, 7, 100}) CHECK(energy_bruteforce(diag, H) == H);
}

TEST_CASE("divisor-moment sieve frozen values") {
    CHECK(moment_divisor_sieve(2, 2, box({2, 2})) == 6);
    CHECK(moment_divisor_sieve(2, 2, box({4, 4})) == 32);
    CHECK(moment_divisor_sieve(2, 2, box({10, 10})) == 278);
    CHECK(moment_divisor_sieve(2, 2, box({256, 256})) == 411968);
    CHECK(moment_divisor_sieve(2, 1, box({7, 7})) == 49);  // k=1 counts the box
    CHECK(moment_divisor_sieve(3, 1, box({3, 4, 5})) == 60);
    CHECK(moment_divisor_sieve(2, 2, box({5, 9})) == moment_divisor_sieve(2, 2, box({9, 5})));
}

TEST_CASE("divisor-moment sieve agrees with the reference loop") {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<long> xd(1, 40), md(1, 3), kd(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        int m = md(rng), k = kd(rng);
        std::vector<Integer> X;
        for (int i = 0; i < m; ++i) X.emplace_back(xd(rng));
        CHECK(moment_divisor_sieve(m, k, X) == slow_moment(m, k, X));
    }
}

TEST_CASE("k=1 moments count the box exactly") {
    std::mt19937_64 rng(60);
    std::uniform_int_distribution<long> xd(1, 60);
    for (int m = 1; m <= 3; ++m)
        for (int trial = 0; trial < 17; ++trial) {
            std::vector<Integer> X;
            Integer prod = 1;
            for (int i = 0; i < m; ++i) {
                X.emplace_back(xd(rng));
                prod *= X.back();
            }
            CHECK(moment_divisor_sieve(m, 1, X) == prod);
        }
}

TEST_CASE("power-moment sieve frozen values") {
    CHECK(moment_power_sieve(2, 1, 2, box({4, 4})) == 6);
    CHECK(moment_power_sieve(2, 2, 2, box({4, 4})) == 12);
    CHECK(moment_power_sieve(2, 1, 1, box({30, 30})) == moment_divisor_sieve(2, 1, box({30, 30})));
    CHECK(moment_power_sieve(3, 2, 1, box({12, 12, 12})) ==
          moment_divisor_sieve(3, 2, box({12, 12, 12})));
}

TEST_CASE("square products match the power sieve") {
    for (long x = 1; x <= 200; ++x)
        CHECK(square_product_pair_count(x) == moment_power_sieve(2, 1, 2, box({x, x})));
    CHECK(square_product_pair_count(4) == 6);
    CHECK(square_product_pair_count(10000) == 57296);
}

TEST_CASE("weighted-box moments") {
    CHECK(tau_xi_moment({1, 1}, 2, {Rational(1), Rational(1)}, 4) == 32);
    CHECK(tau_xi_moment({1, 2}, 2, {Rational(1), Rational(1)}, 3) == 9);
    // k=1 always counts the box.
    CHECK(tau_xi_moment({1, 3}, 1, {Rational(1), Rational(1)}, 5) == 25);
    CHECK(tau_xi_moment({2, 3}, 1, {Rational(1), Rational(1, 2)}, 9) == 27);
    // xi = (1,1) with equal boxes reduces to the pair-product moment.
    for (long h : {10, 30})
        CHECK(tau_xi_moment({1, 1}, 2, {Rational(1), Rational(1)}, h) ==
              moment_divisor_sieve(2, 2, box({h, h})));
}

TEST_CASE("signed singular matrix counts") {
    CHECK(singular_matrix_count(1) == 33);
    CHECK(singular_matrix_count(2) == 129);
    CHECK(singular_matrix_count(3) == 289);
    CHECK(egyptian_singular_count(1) == 8);
    CHECK(egyptian_singular_count(2) == 48);
    CHECK(egyptian_singular_count(3) == 120);
    // The two engines split the same quadruple set by whether a zero entry
    // appears; tie them together with a direct four-loop enumeration.
    for (long h : {1, 2, 3}) {
        Integer with_zero = 0;
        for (long a = -h; a <= h; ++a)
            for (long b = -h; b <= h; ++b)
                for (long c = -h; c <= h; ++c)
                    for (long d = -h; d <= h; ++d)
                        if (a * d == b * c && !(a && b && c && d)) ++with_zero;
        CHECK(singular_matrix_count(h) == egyptian_singular_count(h) + with_zero);
    }
}

TEST_CASE("singular counts tie to the pair moment") {
    // D(H) = 8 M_{2,2}(H) + (4H+1)^2 + 8H^2: sign choices give the 8, zero
    // rows/columns the rest; the identity pins both engines to each other.
    for (long h : {1, 5, 10, 25}) {
        Integer m = moment_divisor_sieve(2, 2, box({h, h}));
        Integer d = singular_matrix_count(h);
        Integer slack = d - 8 * m - 16 * Integer(h) * h;
        CHECK(slack == 8 * Integer(h) + 1);
    }
}

TEST_CASE("coprimality-restricted moment") {
    CHECK(restricted_moment(2, 4) == 6);
    CHECK(restricted_moment(1, 4) == 32);
    CHECK(restricted_moment(6, 4) == 1);
    // Reference: filter the full moment by hand.
    for (long q : {2, 3, 6}) {
        std::map<Integer, Integer> tau;
        for (long x = 1; x <= 20; ++x)
            for (long y = 1; y <= 20; ++y) ++tau[Integer(x) * y];
        Integer want = 0;
        for (const auto& [n, t] : tau)
            if (gcd(n, Integer(q)) == 1) want += t * t;
        CHECK(restricted_moment(q, 20) == want);
    }
}

TEST_CASE("restricted energy equals the restricted moment") {
    ProblemSpec p = parse_problem(R"({
      "parts": [ {"gamma": [1,1], "b": ["1","1"]},
                 {"gamma": [1,1], "b": ["1","1"]} ],
      "restriction": [ {"p": 2, "rule": "coprime"} ],
      "balanced": true
    })");
    for (long h : {4, 20, 50}) CHECK(energy_bruteforce(p, h) == restricted_moment(2, h));
}

TEST_CASE("census grid routes to the right engines") {
    CensusResult r = census_grid(pair_problem(), box({2, 4}));
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].H == 2);
    CHECK(r.rows[0].count == 6);
    CHECK(r.rows[1].count == 32);
    CHECK(r.rows[0].method.find("sieve") != std::string::npos);

    CensusResult sq = census_grid(square_pair_problem(), box({4}));
    CHECK(sq.rows[0].count == 6);

    // Coprimality restriction is not sieve-eligible; brute force takes over.
    ProblemSpec p = parse_problem(R"({
      "parts": [ {"gamma": [1,1], "b": ["1","1"]},
                 {"gamma": [1,1], "b": ["1","1"]} ],
      "restriction": [ {"p": 2, "rule": "coprime"} ],
      "balanced": true
    })");
    CensusResult res = census_grid(p, box({4}));
    CHECK(res.rows[0].count == 6);
    CHECK(res.rows[0].method.find("sieve") == std::string::npos);

    CHECK(census_grid(pair_problem(), {}).rows.empty());
}

TEST_CASE("energy equals the sieves on matching encodings") {
    for (long h : {50, 200}) {
        ProblemSpec prod22 = product_moment_problem(2, 2, {Rational(1), Rational(1)});
        CHECK(energy_bruteforce(prod22, h) == moment_divisor_sieve(2, 2, box({h, h})));
        ProblemSpec pow212 = power_moment_problem(2, 1, 2, {Rational(1), Rational(1)});
        CHECK(energy_bruteforce(pow212, h) == moment_power_sieve(2, 1, 2, box({h, h})));
    }
    ProblemSpec prod32 = product_moment_problem(3, 2, {Rational(1), Rational(1), Rational(1)});
    CHECK(energy_bruteforce(prod32, 30) == moment_divisor_sieve(3, 2, box({30, 30, 30})));
    ProblemSpec pow222 = power_moment_problem(2, 2, 2, {Rational(1), Rational(1)});
    CHECK(energy_bruteforce(pow222, 50) == moment_power_sieve(2, 2, 2, box({50, 50})));
}

TEST_CASE("thread count never changes a count") {
    CountOptions serial, two, eight;
    two.threads = 2;
    eight.threads = 8;
    Integer base = moment_divisor_sieve(2, 2, box({300, 300}), serial);
    CHECK(moment_divisor_sieve(2, 2, box({300, 300}), two) == base);
    CHECK(moment_divisor_sieve(2, 2, box({300, 300}), eight) == base);

    Integer sing = singular_matrix_count(200, serial);
    CHECK(singular_matrix_count(200, two) == sing);
    CHECK(singular_matrix_count(200, eight) == sing);

    Integer pow = moment_power_sieve(2, 2, 2, box({400, 400}), serial);
    CHECK(moment_power_sieve(2, 2, 2, box({400, 400}), eight) == pow);

    Integer en = energy_bruteforce(pair_problem(), 150, serial);
    CHECK(energy_bruteforce(pair_problem(), 150, eight) == en);

    Integer sq = square_product_pair_count(100000, serial);
    CHECK(square_product_pair_count(100000, eight) == sq);
}

TEST_CASE("segmentation never changes a count") {
    CountOptions tiny;
    tiny.dense_cells = 1000;  // force many segments
    CHECK(moment_divisor_sieve(2, 2, box({200, 200}), tiny) ==
          moment_divisor_sieve(2, 2, box({200, 200})));
    tiny.threads = 4;
    CHECK(moment_divisor_sieve(2, 2, box({211, 193}), tiny) ==
          moment_divisor_sieve(2, 2, box({211, 193})));
}

TEST_CASE("operation budgets abort oversized requests") {
    CountOptions strict;
    strict.op_budget = 1000;
    CHECK_THROWS_AS(moment_divisor_sieve(2, 2, box({100000, 100000}), strict), BudgetExceeded);
    CHECK_THROWS_AS(energy_bruteforce(pair_problem(), 100000, strict), BudgetExceeded);
}

TEST_CASE("validation of engine arguments") {
    CHECK_THROWS_AS(moment_divisor_sieve(0, 2, box({4})), ValidationError);
    CHECK_THROWS_AS(moment_divisor_sieve(2, 0, box({4, 4})), ValidationError);
    CHECK_THROWS_AS(moment_divisor_sieve(2, 2, box({4})), ValidationError);  // wrong arity
    CHECK_THROWS_AS(moment_power_sieve(2, 1, 0, box({4, 4})), ValidationError);
    CHECK_THROWS_AS(tau_xi_moment({0}, 1, {Rational(1)}, 4), ValidationError);
    CHECK_THROWS_AS(tau_xi_moment({1}, 1, {Rational(-1)}, 4), ValidationError);
    CHECK_THROWS_AS(singular_matrix_count(-1), ValidationError);
    CHECK(singular_matrix_count(0) == 1);  // only the zero matrix
    CHECK(egyptian_singular_count(0) == 0);
    CHECK_THROWS_AS(restricted_moment(0, 4), ValidationError);
}
