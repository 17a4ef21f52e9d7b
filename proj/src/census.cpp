#include "divlab/census.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <thread>
#include <unordered_map>

namespace divlab {

namespace {

constexpr std::uint64_t kSmallKeyLimit = 1ULL << 62;

Integer from_u128(unsigned __int128 v) {
    const std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(v);
    return (Integer(hi) << 64) + lo;
}

std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r > n / r) --r;
    while ((r + 1) <= n / (r + 1)) ++r;
    return r;
}

std::int64_t checked_edge(const Integer& e) {
    if (e > Integer(std::numeric_limits<std::int64_t>::max()))
        throw BudgetExceeded("box edge exceeds 64-bit range");
    return static_cast<std::int64_t>(e);
}

// Contiguous chunks [begin, end) covering [1, n], one per worker.
std::vector<std::pair<std::int64_t, std::int64_t>> chunk_range(std::int64_t n, int threads) {
    const int t = std::max(1, threads);
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    const std::int64_t step = (n + t - 1) / std::max<std::int64_t>(t, 1);
    for (std::int64_t lo = 1; lo <= n; lo += step)
        out.emplace_back(lo, std::min<std::int64_t>(n, lo + step - 1) + 1);
    if (out.empty()) out.emplace_back(1, 1);
    return out;
}

void run_workers(std::size_t jobs, int threads, const std::function<void(std::size_t)>& fn) {
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
    if (t <= 1) {
        for (std::size_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t j = next.fetch_add(1);
                if (j >= jobs) return;
                fn(j);
            }
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Per-part value counters for the energy count.
// ---------------------------------------------------------------------------
using PatternKey = std::vector<std::int64_t>;  // valuations at the finite-complement primes

struct PartProblem {
    std::vector<std::int64_t> gamma;              // per-coordinate exponent
    std::vector<std::int64_t> edges;              // box edge per coordinate
    std::vector<std::vector<std::int64_t>> avoid;  // per coordinate: primes that must not divide
    std::vector<std::int64_t> fc_primes;           // shared across parts, may be empty

    bool operator==(const PartProblem& o) const {
        return gamma == o.gamma && edges == o.edges && avoid == o.avoid &&
               fc_primes == o.fc_primes;
    }
};

struct PartCounter {
    bool big = false;
    // Keys without finite-complement rules.
    std::unordered_map<std::uint64_t, std::uint64_t> small_plain;
    std::map<Integer, Integer> big_plain;
    // Keys refined by the local pattern the finite-complement rules see.
    std::map<Integer, std::map<PatternKey, Integer>> patterned;
};

bool coordinate_allowed(std::int64_t x, const std::vector<std::int64_t>& avoid) {
    for (std::int64_t p : avoid)
        if (x % p == 0) return false;
    return true;
}

// Enumerates the coordinate box of one part with the first coordinate
// restricted to [first_lo, first_hi), invoking sink(value) at each tuple.
template <typename Value, typename Sink>
void walk_part_plain(const PartProblem& part, std::int64_t first_lo, std::int64_t first_hi,
                     const Sink& sink) {
    const int m = static_cast<int>(part.gamma.size());
    std::vector<Value> partial(m + 1);
    partial[0] = Value(1);
    std::function<void(int)> rec = [&](int j) {
        const std::int64_t lo = (j == 0) ? first_lo : 1;
        const std::int64_t hi = (j == 0) ? first_hi : part.edges[j] + 1;
        for (std::int64_t x = lo; x < hi; ++x) {
            if (!coordinate_allowed(x, part.avoid[j])) continue;
            Value pw(1);
            for (std::int64_t e = 0; e < part.gamma[j]; ++e) pw *= Value(x);
            partial[j + 1] = partial[j] * pw;
            if (j + 1 == m)
                sink(partial[m]);
            else
                rec(j + 1);
        }
    };
    rec(0);
}

// Same but also reporting the valuation pattern at the finite-complement
// primes (laid out prime-major: [p0 coords..., p1 coords...]).
template <typename Sink>
void walk_part_patterned(const PartProblem& part, std::int64_t first_lo, std::int64_t first_hi,
                         const Sink& sink) {
    const int m = static_cast<int>(part.gamma.size());
    const int np = static_cast<int>(part.fc_primes.size());
    std::vector<Integer> partial(m + 1);
    partial[0] = 1;
    PatternKey pattern(static_cast<std::size_t>(np) * m, 0);
    std::function<void(int)> rec = [&](int j) {
        const std::int64_t lo = (j == 0) ? first_lo : 1;
        const std::int64_t hi = (j == 0) ? first_hi : part.edges[j] + 1;
        for (std::int64_t x = lo; x < hi; ++x) {
            if (!coordinate_allowed(x, part.avoid[j])) continue;
            partial[j + 1] = partial[j] * ipow(Integer(x), static_cast<unsigned long>(part.gamma[j]));
            for (int t = 0; t < np; ++t) {
                std::int64_t v = 0, y = x;
                while (y % part.fc_primes[t] == 0) { y /= part.fc_primes[t]; ++v; }
                pattern[static_cast<std::size_t>(t) * m + j] = v;
            }
            if (j + 1 == m)
                sink(partial[m], pattern);
            else
                rec(j + 1);
        }
    };
    rec(0);
}

PartCounter build_part_counter(const PartProblem& part, bool big_keys, int threads) {
    const std::int64_t first_edge = part.edges.empty() ? 1 : part.edges[0];
    auto chunks = chunk_range(first_edge, threads);
    const bool patterned = !part.fc_primes.empty();

    std::vector<PartCounter> locals(chunks.size());
    run_workers(chunks.size(), threads, [&](std::size_t c) {
        PartCounter& local = locals[c];
        local.big = big_keys || patterned;
        if (patterned) {
            walk_part_patterned(part, chunks[c].first, chunks[c].second,
                                [&](const Integer& v, const PatternKey& pat) {
                                    local.patterned[v][pat] += 1;
                                });
        } else if (big_keys) {
            walk_part_plain<Integer>(part, chunks[c].first, chunks[c].second,
                                     [&](const Integer& v) { local.big_plain[v] += 1; });
        } else {
            walk_part_plain<std::uint64_t>(part, chunks[c].first, chunks[c].second,
                                           [&](std::uint64_t v) { local.small_plain[v] += 1; });
        }
    });

    PartCounter merged = std::move(locals[0]);
    for (std::size_t c = 1; c < locals.size(); ++c) {
        for (const auto& [v, n] : locals[c].small_plain) merged.small_plain[v] += n;
        for (const auto& [v, n] : locals[c].big_plain) merged.big_plain[v] += n;
        for (const auto& [v, pats] : locals[c].patterned)
            for (const auto& [pat, n] : pats) merged.patterned[v][pat] += n;
    }
    return merged;
}

}  // namespace

std::vector<Integer> box_edges(const BoxExponents& box, const Integer& H) {
    if (H < 1) throw ValidationError("H must be a positive integer");
    std::vector<Integer> edges;
    edges.reserve(box.b.size());
    for (const Rational& e : box.b) edges.push_back(floor_pow(H, e));
    return edges;
}

Integer energy_bruteforce(const ProblemSpec& spec, const Integer& H,
                          const CountOptions& opts) {
    spec.validate();
    const Shape& shape = spec.system.shape;
    const int k = shape.parts();
    const std::vector<Integer> edges = box_edges(spec.box, H);

    // Coordinate divisibility filters from zero-coordinate rules, and the
    // list of finite-complement rules that must see valuation patterns.
    std::vector<std::vector<std::int64_t>> avoid(shape.total());
    std::vector<const LocalRule*> fc_rules;
    std::vector<std::int64_t> fc_primes;
    for (const LocalRule& rule : spec.restriction.rules) {
        if (rule.kind == RuleKind::ZeroCoords) {
            for (int t : rule.zero_coords) avoid[t].push_back(rule.p);
        } else if (rule.kind == RuleKind::FiniteComplement) {
            fc_rules.push_back(&rule);
            fc_primes.push_back(rule.p);
        }
    }

    // Budget: enumeration work is the per-part box size.
    Integer max_value = 0;
    std::vector<PartProblem> parts(k);
    for (int i = 0; i < k; ++i) {
        PartProblem& part = parts[i];
        Integer cells = 1;
        Integer value = 1;
        for (int j = 0; j < shape.part_size(i); ++j) {
            const int t = shape.flat(i, j);
            part.gamma.push_back(spec.system.gamma[t]);
            part.edges.push_back(checked_edge(edges[t]));
            part.avoid.push_back(avoid[t]);
            cells *= edges[t];
            value *= ipow(edges[t], static_cast<unsigned long>(spec.system.gamma[t]));
        }
        part.fc_primes = fc_primes;
        if (cells > opts.op_budget)
            throw BudgetExceeded("part " + std::to_string(i + 1) + " box has " + cells.str() +
                                 " tuples, over the budget of " + std::to_string(opts.op_budget));
        max_value = std::max(max_value, value);
    }

    const bool big_keys = max_value >= Integer(kSmallKeyLimit);

    // One counter per distinct part problem; duplicates reuse it.
    std::vector<int> counter_of(k, -1);
    std::vector<PartCounter> counters;
    std::vector<PartProblem> built;
    for (int i = 0; i < k; ++i) {
        for (std::size_t g = 0; g < built.size(); ++g)
            if (built[g] == parts[i]) { counter_of[i] = static_cast<int>(g); break; }
        if (counter_of[i] < 0) {
            built.push_back(parts[i]);
            counters.push_back(build_part_counter(parts[i], big_keys, opts.threads));
            counter_of[i] = static_cast<int>(counters.size()) - 1;
        }
    }

    if (fc_rules.empty()) {
        // Multiplicity of each counter among the parts.
        std::vector<unsigned long> mult(counters.size(), 0);
        for (int i = 0; i < k; ++i) ++mult[counter_of[i]];

        Integer total = 0;
        if (!big_keys) {
            // Iterate the smallest map; product across counters.
            std::size_t lead = 0;
            for (std::size_t g = 1; g < counters.size(); ++g)
                if (counters[g].small_plain.size() < counters[lead].small_plain.size()) lead = g;
            for (const auto& [v, lead_count] : counters[lead].small_plain) {
                Integer prod = 1;
                bool present = true;
                for (std::size_t g = 0; g < counters.size() && present; ++g) {
                    std::uint64_t c = lead_count;
                    if (g != lead) {
                        auto it = counters[g].small_plain.find(v);
                        if (it == counters[g].small_plain.end()) { present = false; break; }
                        c = it->second;
                    }
                    prod *= ipow(Integer(c), mult[g]);
                }
                if (present) total += prod;
            }
        } else {
            std::size_t lead = 0;
            for (std::size_t g = 1; g < counters.size(); ++g)
                if (counters[g].big_plain.size() < counters[lead].big_plain.size()) lead = g;
            for (const auto& [v, lead_count] : counters[lead].big_plain) {
                Integer prod = 1;
                bool present = true;
                for (std::size_t g = 0; g < counters.size() && present; ++g) {
                    Integer c = lead_count;
                    if (g != lead) {
                        auto it = counters[g].big_plain.find(v);
                        if (it == counters[g].big_plain.end()) { present = false; break; }
                        c = it->second;
                    }
                    prod *= ipow(c, mult[g]);
                }
                if (present) total += prod;
            }
        }
        return total;
    }

    // Finite-complement path: values carry local valuation patterns, and a
    // tuple of per-part patterns is admissible when every rule accepts the
    // assembled flat pattern.
    const int total_coords = shape.total();
    std::int64_t merge_work = 0;
    Integer total = 0;
    const auto& lead_map = counters[counter_of[0]].patterned;
    std::vector<const std::map<PatternKey, Integer>*> at_value(k, nullptr);
    for (const auto& [v, lead_pats] : lead_map) {
        bool present = true;
        for (int i = 0; i < k && present; ++i) {
            const auto& cmap = counters[counter_of[i]].patterned;
            auto it = cmap.find(v);
            if (it == cmap.end()) present = false;
            else at_value[i] = &it->second;
        }
        if (!present) continue;

        // DFS over per-part pattern choices.
        std::vector<ExponentVector> flat(fc_rules.size());
        for (auto& f : flat) f.r.assign(total_coords, 0);
        std::function<void(int, const Integer&)> rec = [&](int i, const Integer& acc) {
            if (++merge_work > opts.op_budget)
                throw BudgetExceeded("pattern merge exceeded the operation budget");
            if (i == k) {
                for (std::size_t t = 0; t < fc_rules.size(); ++t)
                    if (!fc_rules[t]->allows(flat[t])) return;
                total += acc;
                return;
            }
            const int m = shape.part_size(i);
            for (const auto& [pat, count] : *at_value[i]) {
                for (std::size_t t = 0; t < fc_rules.size(); ++t)
                    for (int j = 0; j < m; ++j)
                        flat[t].r[shape.flat(i, j)] = pat[t * m + j];
                rec(i + 1, acc * count);
            }
        };
        rec(0, Integer(1));
    }
    return total;
}

// ---------------------------------------------------------------------------
// Divisor-moment sieve.
// ---------------------------------------------------------------------------
namespace {

// Adds tau_m(n; X) for n in [lo, hi] into counts (counts[n - lo]).
void accumulate_tau_segment(const std::vector<std::int64_t>& X, std::int64_t lo,
                            std::int64_t hi, std::vector<std::uint32_t>& counts) {
    const int m = static_cast<int>(X.size());
    std::function<void(int, std::int64_t)> rec = [&](int level, std::int64_t prod) {
        if (level == m - 1) {
            const std::int64_t dlo = std::max<std::int64_t>(1, (lo + prod - 1) / prod);
            const std::int64_t dhi = std::min<std::int64_t>(X[level], hi / prod);
            for (std::int64_t d = dlo; d <= dhi; ++d) ++counts[prod * d - lo];
            return;
        }
        const std::int64_t dmax = std::min<std::int64_t>(X[level], hi / prod);
        for (std::int64_t d = 1; d <= dmax; ++d) rec(level + 1, prod * d);
    };
    if (m == 1) {
        for (std::int64_t n = std::max<std::int64_t>(1, lo); n <= std::min(hi, X[0]); ++n)
            ++counts[n - lo];
        return;
    }
    rec(0, 1);
}

Integer sum_power_u32(const std::vector<std::uint32_t>& counts, int k) {
    // k-th powers summed exactly; stay in 128-bit words while each power
    // fits 64 bits, spill to big integers otherwise.
    unsigned __int128 acc = 0;
    Integer overflow = 0;
    const double limit_log = 63.0;
    for (std::uint32_t c : counts) {
        if (c == 0) continue;
        const double need = static_cast<double>(k) * std::log2(static_cast<double>(c));
        if (need < limit_log) {
            std::uint64_t pw = 1;
            for (int e = 0; e < k; ++e) pw *= c;
            acc += pw;
        } else {
            overflow += ipow(Integer(c), static_cast<unsigned long>(k));
        }
    }
    return from_u128(acc) + overflow;
}

struct SegmentPlan {
    std::int64_t total = 0;     // value range [1, total]
    std::int64_t seg_size = 0;  // cells per segment
    std::vector<std::pair<std::int64_t, std::int64_t>> segments;
};

SegmentPlan plan_segments(std::int64_t total, const CountOptions& opts) {
    SegmentPlan plan;
    plan.total = total;
    const int t = std::max(1, opts.threads);
    std::int64_t size = std::min<std::int64_t>(opts.dense_cells, (total + t - 1) / t);
    size = std::max<std::int64_t>(size, 1);
    plan.seg_size = size;
    for (std::int64_t lo = 1; lo <= total; lo += size)
        plan.segments.emplace_back(lo, std::min<std::int64_t>(total, lo + size - 1));
    return plan;
}

}  // namespace

Integer moment_divisor_sieve(int m, int k, const std::vector<Integer>& X,
                             const CountOptions& opts) {
    if (m < 1 || k < 1) throw ValidationError("m and k must be positive");
    if (static_cast<int>(X.size()) != m)
        throw ValidationError("expected " + std::to_string(m) + " box edges");
    std::vector<std::int64_t> edges;
    Integer range = 1;
    for (const Integer& x : X) {
        if (x < 1) throw ValidationError("box edges must be positive");
        edges.push_back(checked_edge(x));
        range *= x;
    }
    if (range > opts.op_budget)
        throw BudgetExceeded("value range " + range.str() + " exceeds the operation budget");

    const std::int64_t total = static_cast<std::int64_t>(range);
    SegmentPlan plan = plan_segments(total, opts);

    std::vector<Integer> partial(plan.segments.size(), Integer(0));
    run_workers(plan.segments.size(), opts.threads, [&](std::size_t s) {
        const auto [lo, hi] = plan.segments[s];
        std::vector<std::uint32_t> counts(hi - lo + 1, 0);
        accumulate_tau_segment(edges, lo, hi, counts);
        partial[s] = sum_power_u32(counts, k);
    });

    Integer totalsum = 0;
    for (const Integer& p : partial) totalsum += p;
    return totalsum;
}

// ---------------------------------------------------------------------------
// Power-moment sieve.
// ---------------------------------------------------------------------------
namespace {

// Ordered m-factorisations of the number with the given prime powers that
// fit the box: distribute each prime's exponent over the m slots.
std::uint64_t count_box_factorizations(const std::vector<std::pair<std::int64_t, int>>& factors,
                                       const std::vector<std::int64_t>& X) {
    const int m = static_cast<int>(X.size());
    std::uint64_t count = 0;
    std::vector<std::int64_t> d(m, 1);
    std::function<void(std::size_t)> per_prime = [&](std::size_t f) {
        if (f == factors.size()) { ++count; return; }
        const std::int64_t p = factors[f].first;
        const int e = factors[f].second;
        std::function<void(int, int)> distribute = [&](int slot, int left) {
            if (slot == m - 1) {
                // Remaining exponent goes to the last slot if it fits.
                std::int64_t v = d[slot];
                for (int i = 0; i < left; ++i) {
                    if (v > X[slot] / p) return;
                    v *= p;
                }
                const std::int64_t keep = d[slot];
                d[slot] = v;
                per_prime(f + 1);
                d[slot] = keep;
                return;
            }
            std::int64_t v = d[slot];
            for (int take = 0; take <= left; ++take) {
                if (take > 0) {
                    if (v > X[slot] / p) return;
                    v *= p;
                }
                const std::int64_t keep = d[slot];
                d[slot] = v;
                distribute(slot + 1, left - take);
                d[slot] = keep;
            }
        };
        distribute(0, e);
    };
    per_prime(0);
    return count;
}

}  // namespace

Integer moment_power_sieve(int m, int k, int ell, const std::vector<Integer>& X,
                           const CountOptions& opts) {
    if (m < 1 || k < 1 || ell < 1) throw ValidationError("m, k, ell must be positive");
    if (static_cast<int>(X.size()) != m)
        throw ValidationError("expected " + std::to_string(m) + " box edges");
    Integer range = 1;
    std::vector<std::int64_t> edges;
    for (const Integer& x : X) {
        if (x < 1) throw ValidationError("box edges must be positive");
        edges.push_back(checked_edge(x));
        range *= x;
    }
    const Integer ycap = floor_root(range, static_cast<unsigned long>(ell));
    const std::int64_t Y = checked_edge(ycap);
    if (Y > opts.op_budget || Y > opts.dense_cells)
        throw BudgetExceeded("power-moment base range " + ycap.str() + " over budget");
    if (range >= Integer(kSmallKeyLimit))
        throw BudgetExceeded("box product too large for 64-bit factorisation path");

    // Smallest-prime-factor table up to Y.
    std::vector<std::int32_t> spf(Y + 1, 0);
    for (std::int64_t i = 2; i <= Y; ++i) {
        if (spf[i] != 0) continue;
        for (std::int64_t j = i; j <= Y; j += i)
            if (spf[j] == 0) spf[j] = static_cast<std::int32_t>(i);
    }

    auto chunks = chunk_range(Y, opts.threads);
    std::vector<Integer> partial(chunks.size(), Integer(0));
    run_workers(chunks.size(), opts.threads, [&](std::size_t c) {
        unsigned __int128 acc = 0;
        Integer spill = 0;
        for (std::int64_t y = chunks[c].first; y < chunks[c].second; ++y) {
            std::vector<std::pair<std::int64_t, int>> factors;
            std::int64_t rest = y;
            while (rest > 1) {
                const std::int64_t p = spf[rest];
                int e = 0;
                while (rest % p == 0) { rest /= p; ++e; }
                factors.emplace_back(p, e * ell);
            }
            const std::uint64_t tau = count_box_factorizations(factors, edges);
            if (tau == 0) continue;
            const double need = static_cast<double>(k) * std::log2(static_cast<double>(tau));
            if (need < 63.0) {
                std::uint64_t pw = 1;
                for (int e = 0; e < k; ++e) pw *= tau;
                acc += pw;
            } else {
                spill += ipow(Integer(tau), static_cast<unsigned long>(k));
            }
        }
        partial[c] = from_u128(acc) + spill;
    });

    Integer total = 0;
    for (const Integer& p : partial) total += p;
    return total;
}

Integer tau_xi_moment(const std::vector<std::int64_t>& xi, int k,
                      const std::vector<Rational>& c, const Integer& H,
                      const CountOptions& opts) {
    if (xi.empty() || k < 1) throw ValidationError("xi must be nonempty and k positive");
    if (xi.size() != c.size()) throw ValidationError("xi and c disagree in length");
    for (std::int64_t e : xi)
        if (e < 1) throw ValidationError("xi entries must be positive");
    for (const Rational& e : c)
        if (e <= 0) throw ValidationError("box exponents must be positive");

    PartProblem part;
    Integer cells = 1;
    Integer max_value = 1;
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const Integer edge = floor_pow(H, c[j]);
        part.gamma.push_back(xi[j]);
        part.edges.push_back(checked_edge(edge));
        part.avoid.emplace_back();
        cells *= edge;
        max_value *= ipow(edge, static_cast<unsigned long>(xi[j]));
    }
    if (cells > opts.op_budget)
        throw BudgetExceeded("weighted box has " + cells.str() + " tuples, over budget");

    const bool big = max_value >= Integer(kSmallKeyLimit);
    PartCounter counter = build_part_counter(part, big, opts.threads);
    Integer total = 0;
    if (big) {
        for (const auto& [v, n] : counter.big_plain)
            total += ipow(n, static_cast<unsigned long>(k));
    } else {
        for (const auto& [v, n] : counter.small_plain)
            total += ipow(Integer(n), static_cast<unsigned long>(k));
    }
    return total;
}

Integer square_product_pair_count(const Integer& X, const CountOptions& opts) {
    const std::int64_t x = checked_edge(X);
    if (x < 1) throw ValidationError("X must be positive");
    if (x > opts.op_budget || x > opts.dense_cells)
        throw BudgetExceeded("squarefree sieve range over budget");

    std::vector<bool> squarefree(x + 1, true);
    for (std::int64_t d = 2; d * d <= x; ++d) {
        const std::int64_t dd = d * d;
        for (std::int64_t j = dd; j <= x; j += dd) squarefree[j] = false;
    }
    unsigned __int128 acc = 0;
    for (std::int64_t s = 1; s <= x; ++s) {
        if (!squarefree[s]) continue;
        const std::uint64_t r = isqrt_u64(static_cast<std::uint64_t>(x / s));
        acc += static_cast<unsigned __int128>(r) * r;
    }
    return from_u128(acc);
}

// ---------------------------------------------------------------------------
// Signed singular counts.
// ---------------------------------------------------------------------------
namespace {

// sum over v in [1, h^2] of D_h(v)^2 where D_h(v) = #{(a,d) in [1,h]^2 : ad = v},
// computed in dense segments.
Integer sum_positive_pair_squares(std::int64_t h, const CountOptions& opts) {
    const std::int64_t total = h * h;
    SegmentPlan plan = plan_segments(total, opts);
    std::vector<Integer> partial(plan.segments.size(), Integer(0));
    run_workers(plan.segments.size(), opts.threads, [&](std::size_t s) {
        const auto [lo, hi] = plan.segments[s];
        std::vector<std::uint32_t> counts(hi - lo + 1, 0);
        for (std::int64_t a = 1; a <= h; ++a) {
            const std::int64_t dlo = std::max<std::int64_t>(1, (lo + a - 1) / a);
            const std::int64_t dhi = std::min<std::int64_t>(h, hi / a);
            for (std::int64_t d = dlo; d <= dhi; ++d) ++counts[a * d - lo];
        }
        partial[s] = sum_power_u32(counts, 2);
    });
    Integer out = 0;
    for (const Integer& p : partial) out += p;
    return out;
}

}  // namespace

Integer singular_matrix_count(const Integer& H, const CountOptions& opts) {
    const std::int64_t h = checked_edge(H);
    if (h < 0) throw ValidationError("H must be nonnegative");
    if (h == 0) return Integer(1);
    if (h > opts.op_budget / std::max<std::int64_t>(h, 1))
        throw BudgetExceeded("H^2 exceeds the operation budget");
    // N(0) = 4h+1 pairs with a zero factor; each nonzero v on either sign
    // carries N(v) = 2 D_h(|v|).
    const Integer zero_pairs = 4 * Integer(h) + 1;
    return zero_pairs * zero_pairs + 8 * sum_positive_pair_squares(h, opts);
}

Integer egyptian_singular_count(const Integer& H, const CountOptions& opts) {
    const std::int64_t h = checked_edge(H);
    if (h < 0) throw ValidationError("H must be nonnegative");
    if (h == 0) return Integer(0);
    if (h > opts.op_budget / std::max<std::int64_t>(h, 1))
        throw BudgetExceeded("H^2 exceeds the operation budget");
    return 8 * sum_positive_pair_squares(h, opts);
}

Integer restricted_moment(const Integer& q, const Integer& X, const CountOptions& opts) {
    const std::int64_t x = checked_edge(X);
    const std::int64_t qq = checked_edge(q);
    if (x < 1 || qq < 1) throw ValidationError("q and X must be positive");
    if (x > opts.op_budget / std::max<std::int64_t>(x, 1))
        throw BudgetExceeded("X^2 exceeds the operation budget");

    // Allowed factors: coprime to q.
    std::vector<std::int64_t> q_primes;
    std::int64_t rest = qq;
    for (std::int64_t p = 2; p * p <= rest; ++p)
        if (rest % p == 0) {
            q_primes.push_back(p);
            while (rest % p == 0) rest /= p;
        }
    if (rest > 1) q_primes.push_back(rest);

    std::vector<bool> allowed(x + 1, true);
    allowed[0] = false;
    for (std::int64_t p : q_primes)
        for (std::int64_t j = p; j <= x; j += p) allowed[j] = false;

    std::vector<std::int64_t> ds;
    for (std::int64_t d = 1; d <= x; ++d)
        if (allowed[d]) ds.push_back(d);

    const std::int64_t total = x * x;
    SegmentPlan plan = plan_segments(total, opts);
    std::vector<Integer> partial(plan.segments.size(), Integer(0));
    run_workers(plan.segments.size(), opts.threads, [&](std::size_t s) {
        const auto [lo, hi] = plan.segments[s];
        std::vector<std::uint32_t> counts(hi - lo + 1, 0);
        for (std::int64_t d1 : ds) {
            if (d1 > hi) break;
            const std::int64_t dhi = std::min<std::int64_t>(x, hi / d1);
            const std::int64_t dlo = (lo + d1 - 1) / d1;
            auto it = std::lower_bound(ds.begin(), ds.end(), dlo);
            for (; it != ds.end() && *it <= dhi; ++it) ++counts[d1 * *it - lo];
        }
        partial[s] = sum_power_u32(counts, 2);
    });
    Integer out = 0;
    for (const Integer& p : partial) out += p;
    return out;
}

// ---------------------------------------------------------------------------
// Grid orchestration.
// ---------------------------------------------------------------------------
namespace {

struct MomentShape {
    bool is_product = false;  // k parts, all-ones exponents, equal boxes
    bool is_power = false;    // product parts plus one singleton power part
    int m = 0, k = 0, ell = 0;
};

MomentShape detect_moment_shape(const ProblemSpec& spec) {
    MomentShape out;
    if (!spec.restriction.unrestricted()) return out;
    const Shape& shape = spec.system.shape;
    const int parts = shape.parts();

    auto ones_part = [&](int i) {
        for (int j = 0; j < shape.part_size(i); ++j)
            if (spec.system.at(i, j) != 1) return false;
        return true;
    };
    auto same_box_as_first = [&](int i) {
        if (shape.part_size(i) != shape.part_size(0)) return false;
        for (int j = 0; j < shape.part_size(i); ++j)
            if (spec.box.at(i, j) != spec.box.at(0, j)) return false;
        return true;
    };

    bool all_product = parts >= 1;
    for (int i = 0; i < parts && all_product; ++i)
        all_product = ones_part(i) && same_box_as_first(i);
    if (all_product) {
        out.is_product = true;
        out.m = shape.part_size(0);
        out.k = parts;
        return out;
    }

    // Power layout: parts 0..k-1 identical all-ones, final singleton part
    // with exponent ell and box norm(c)/ell.
    if (parts >= 2 && shape.part_size(parts - 1) == 1) {
        bool front_product = true;
        for (int i = 0; i + 1 < parts && front_product; ++i)
            front_product = ones_part(i) && same_box_as_first(i);
        const std::int64_t ell = spec.system.at(parts - 1, 0);
        if (front_product && ell >= 1) {
            Rational norm = 0;
            for (int j = 0; j < shape.part_size(0); ++j) norm += spec.box.at(0, j);
            if (spec.box.at(parts - 1, 0) == norm / ell) {
                out.is_power = true;
                out.m = shape.part_size(0);
                out.k = parts - 1;
                out.ell = static_cast<int>(ell);
            }
        }
    }
    return out;
}

}  // namespace

CensusResult census_grid(const ProblemSpec& spec, const std::vector<Integer>& H_values,
                         const CountOptions& opts) {
    spec.validate();
    CensusResult result;
    const MomentShape ms = detect_moment_shape(spec);

    for (const Integer& H : H_values) {
        CensusRow row;
        row.H = H;
        const auto start = std::chrono::steady_clock::now();
        if (ms.is_product) {
            std::vector<Integer> X;
            for (int j = 0; j < spec.system.shape.part_size(0); ++j)
                X.push_back(floor_pow(H, spec.box.at(0, j)));
            row.count = moment_divisor_sieve(ms.m, ms.k, X, opts);
            row.method = "divisor-sieve";
        } else if (ms.is_power) {
            std::vector<Integer> X;
            for (int j = 0; j < spec.system.shape.part_size(0); ++j)
                X.push_back(floor_pow(H, spec.box.at(0, j)));
            row.count = moment_power_sieve(ms.m, ms.k, ms.ell, X, opts);
            row.method = "power-sieve";
        } else {
            row.count = energy_bruteforce(spec, H, opts);
            row.method = "bruteforce";
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.rows.push_back(std::move(row));
    }
    return result;
}

}  // namespace divlab
