#include "divlab/polytope.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace divlab {

namespace {

bool lex_less(const VectorXq& a, const VectorXq& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

// Exact rank of a rational matrix (in-place Gauss).
int rank_q(MatrixXq A) {
    const int rows = static_cast<int>(A.rows()), cols = static_cast<int>(A.cols());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int pivot = -1;
        for (int i = rank; i < rows; ++i)
            if (A(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != rank) A.row(pivot).swap(A.row(rank));
        for (int i = rank + 1; i < rows; ++i) {
            if (A(i, col) == 0) continue;
            const Rational f = A(i, col) / A(rank, col);
            for (int j = col; j < cols; ++j) A(i, j) -= f * A(rank, j);
        }
        ++rank;
    }
    return rank;
}

// Solves A x = rhs for square rational A; false when singular.
bool solve_square_q(MatrixXq A, VectorXq rhs, VectorXq& out) {
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

Rational det_q(MatrixXq A) {
    const int n = static_cast<int>(A.rows());
    Rational det = 1;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int i = col; i < n; ++i)
            if (A(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) return Rational(0);
        if (pivot != col) {
            A.row(pivot).swap(A.row(col));
            det = -det;
        }
        det *= A(col, col);
        for (int i = col + 1; i < n; ++i) {
            if (A(i, col) == 0) continue;
            const Rational f = A(i, col) / A(col, col);
            for (int j = col; j < n; ++j) A(i, j) -= f * A(col, j);
        }
    }
    return det;
}

// Enumerates size-`pick` index subsets of [0, n); calls fn on each.
void for_each_subset(int n, int pick, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(pick);
    std::function<void(int, int)> rec = [&](int from, int depth) {
        if (depth == pick) { fn(idx); return; }
        for (int i = from; i <= n - (pick - depth); ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (pick >= 0 && pick <= n) rec(0, 0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Vertex enumeration.
// ---------------------------------------------------------------------------
std::vector<VectorXq> vertices_of(const HPolytope& poly) {
    const int d = poly.dim();
    const int m = static_cast<int>(poly.A.rows());
    // Constraint rows: A t <= ub followed by -t_j <= 0.
    const int total = m + d;

    double combos = 1;
    for (int i = 0; i < d; ++i) combos *= static_cast<double>(total - i) / (i + 1);
    if (combos > 5e6) throw SearchTooLarge("vertex enumeration too large for down-set");

    std::set<std::vector<Rational>> found;
    for_each_subset(total, d, [&](const std::vector<int>& pick) {
        MatrixXq M(d, d);
        VectorXq rhs(d);
        for (int i = 0; i < d; ++i) {
            const int row = pick[i];
            if (row < m) {
                for (int j = 0; j < d; ++j) M(i, j) = poly.A(row, j);
                rhs(i) = poly.ub(row);
            } else {
                for (int j = 0; j < d; ++j) M(i, j) = 0;
                M(i, row - m) = 1;
                rhs(i) = 0;
            }
        }
        VectorXq x;
        if (!solve_square_q(M, rhs, x)) return;
        for (int j = 0; j < d; ++j)
            if (x(j) < 0) return;
        for (int i = 0; i < m; ++i) {
            Rational s = 0;
            for (int j = 0; j < d; ++j) s += poly.A(i, j) * x(j);
            if (s > poly.ub(i)) return;
        }
        std::vector<Rational> key(d);
        for (int j = 0; j < d; ++j) key[j] = x(j);
        found.insert(std::move(key));
    });

    std::vector<VectorXq> out;
    for (const auto& key : found) {
        VectorXq v(d);
        for (int j = 0; j < d; ++j) v(j) = key[j];
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<VectorXq> vertices_of(const FiberPolytope& poly) {
    const int d = poly.dim();
    const int m = static_cast<int>(poly.A.rows());

    // Row-reduce [A | rhs] to an independent subsystem, detecting
    // inconsistency (empty fiber) on the way.
    MatrixXq W(m, d + 1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) W(i, j) = poly.A(i, j);
        W(i, d) = poly.rhs(i);
    }
    int rank = 0;
    for (int col = 0; col < d && rank < m; ++col) {
        int pivot = -1;
        for (int i = rank; i < m; ++i)
            if (W(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != rank) W.row(pivot).swap(W.row(rank));
        for (int i = 0; i < m; ++i) {
            if (i == rank || W(i, col) == 0) continue;
            const Rational f = W(i, col) / W(rank, col);
            for (int j = col; j <= d; ++j) W(i, j) -= f * W(rank, j);
        }
        ++rank;
    }
    for (int i = rank; i < m; ++i)
        if (W(i, d) != 0) return {};  // inconsistent: empty fiber

    MatrixXq R = W.topLeftCorner(rank, d);
    VectorXq r = W.block(0, d, rank, 1);

    double combos = 1;
    for (int i = 0; i < rank; ++i) combos *= static_cast<double>(d - i) / (i + 1);
    if (combos > 5e6) throw SearchTooLarge("vertex enumeration too large for fiber");

    std::set<std::vector<Rational>> found;
    for_each_subset(d, rank, [&](const std::vector<int>& cols) {
        MatrixXq M(rank, rank);
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < rank; ++j) M(i, j) = R(i, cols[j]);
        VectorXq xb;
        if (!solve_square_q(M, r, xb)) return;
        for (int j = 0; j < rank; ++j)
            if (xb(j) < 0) return;
        std::vector<Rational> key(d, Rational(0));
        for (int j = 0; j < rank; ++j) key[cols[j]] = xb(j);
        found.insert(std::move(key));
    });

    std::vector<VectorXq> out;
    for (const auto& key : found) {
        VectorXq v(d);
        for (int j = 0; j < d; ++j) v(j) = key[j];
        out.push_back(std::move(v));
    }
    return out;
}

VectorXq coordinate_bounds(const HPolytope& poly) {
    const int d = poly.dim();
    VectorXq ub(d);
    for (int j = 0; j < d; ++j) {
        bool bounded = false;
        Rational best;
        for (int i = 0; i < poly.A.rows(); ++i) {
            if (poly.A(i, j) <= 0) continue;
            const Rational cand = poly.ub(i) / poly.A(i, j);
            if (!bounded || cand < best) { best = cand; bounded = true; }
        }
        if (!bounded)
            throw UnboundedOrDegenerate("down-set coordinate " + std::to_string(j) +
                                        " is unbounded");
        ub(j) = best;
    }
    return ub;
}

// ---------------------------------------------------------------------------
// Placing triangulation.
// ---------------------------------------------------------------------------
namespace {

// Supporting hyperplane <n, x> = beta of a (d-1)-simplex, oriented so the
// reference interior point c satisfies <n, c> < beta.
struct Facet {
    std::vector<int> verts;  // sorted
    VectorXq normal;
    Rational beta;
};

Facet make_facet(const std::vector<VectorXq>& pts, std::vector<int> verts, const VectorXq& c) {
    const int d = static_cast<int>(pts[0].size());
    // Nullspace of the (d-1) x d matrix of edge differences.
    MatrixXq E(d - 1, d);
    for (int i = 1; i < d; ++i)
        for (int j = 0; j < d; ++j)
            E(i - 1, j) = pts[verts[i]](j) - pts[verts[0]](j);

    // Row reduction with recorded pivots; the single free column carries the
    // normal direction.
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < d && rank < d - 1; ++col) {
        int pivot = -1;
        for (int i = rank; i < d - 1; ++i)
            if (E(i, col) != 0) { pivot = i; break; }
        if (pivot < 0) continue;
        if (pivot != rank) E.row(pivot).swap(E.row(rank));
        for (int i = 0; i < d - 1; ++i) {
            if (i == rank || E(i, col) == 0) continue;
            const Rational f = E(i, col) / E(rank, col);
            for (int j = col; j < d; ++j) E(i, j) -= f * E(rank, j);
        }
        pivot_col.push_back(col);
        ++rank;
    }
    if (rank != d - 1) throw ValidationError("degenerate facet in triangulation");
    int free_col = -1;
    for (int col = 0, pi = 0; col < d; ++col) {
        if (pi < rank && pivot_col[pi] == col) { ++pi; continue; }
        free_col = col;
        break;
    }
    VectorXq n(d);
    for (int j = 0; j < d; ++j) n(j) = 0;
    n(free_col) = 1;
    for (int i = rank - 1; i >= 0; --i)
        n(pivot_col[i]) = -E(i, free_col) / E(i, pivot_col[i]);

    Facet f;
    f.verts = std::move(verts);
    Rational beta = 0;
    for (int j = 0; j < d; ++j) beta += n(j) * pts[f.verts[0]](j);
    Rational cval = 0;
    for (int j = 0; j < d; ++j) cval += n(j) * c(j);
    if (cval > beta) {
        for (int j = 0; j < d; ++j) n(j) = -n(j);
        beta = -beta;
    } else if (cval == beta) {
        throw ValidationError("reference point lies on a facet hyperplane");
    }
    f.normal = std::move(n);
    f.beta = beta;
    return f;
}

Rational edge_det(const std::vector<VectorXq>& pts, const std::vector<int>& simplex) {
    const int d = static_cast<int>(pts[0].size());
    MatrixXq M(d, d);
    for (int i = 1; i <= d; ++i)
        for (int j = 0; j < d; ++j)
            M(i - 1, j) = pts[simplex[i]](j) - pts[simplex[0]](j);
    return det_q(M);
}

}  // namespace

Triangulation triangulate(std::vector<VectorXq> points) {
    if (points.empty()) throw ValidationError("cannot triangulate an empty point set");
    const int d = static_cast<int>(points[0].size());
    std::sort(points.begin(), points.end(), lex_less);
    points.erase(std::unique(points.begin(), points.end(),
                             [](const VectorXq& a, const VectorXq& b) { return a == b; }),
                 points.end());

    Triangulation tri;
    tri.points = points;
    const int n = static_cast<int>(points.size());

    if (d == 0) {  // zero-dimensional: a single point, one empty simplex
        tri.simplices.push_back({0});
        tri.absdets.push_back(Rational(1));
        return tri;
    }

    // Greedy affinely independent seed.
    std::vector<int> seed{0};
    for (int i = 1; i < n && static_cast<int>(seed.size()) < d + 1; ++i) {
        std::vector<int> cand = seed;
        cand.push_back(i);
        MatrixXq E(static_cast<int>(cand.size()) - 1, d);
        for (std::size_t t = 1; t < cand.size(); ++t)
            for (int j = 0; j < d; ++j)
                E(static_cast<int>(t) - 1, j) = points[cand[t]](j) - points[cand[0]](j);
        if (rank_q(E) == static_cast<int>(cand.size()) - 1) seed = cand;
    }
    if (static_cast<int>(seed.size()) != d + 1)
        throw ValidationError("points do not affinely span the ambient space");

    VectorXq centre(d);
    for (int j = 0; j < d; ++j) centre(j) = 0;
    for (int idx : seed)
        for (int j = 0; j < d; ++j) centre(j) += points[idx](j);
    for (int j = 0; j < d; ++j) centre(j) /= Rational(d + 1);

    tri.simplices.push_back(seed);
    std::vector<Facet> boundary;
    for (int skip = 0; skip <= d; ++skip) {
        std::vector<int> fv;
        for (int i = 0; i <= d; ++i)
            if (i != skip) fv.push_back(seed[i]);
        std::sort(fv.begin(), fv.end());
        boundary.push_back(make_facet(points, fv, centre));
    }

    std::set<int> seeded(seed.begin(), seed.end());
    for (int q = 0; q < n; ++q) {
        if (seeded.count(q)) continue;
        // Visibility under the pushing convention: strict only.
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(boundary.size()); ++f) {
            Rational val = 0;
            for (int j = 0; j < d; ++j) val += boundary[f].normal(j) * points[q](j);
            if (val > boundary[f].beta) visible.push_back(f);
        }
        if (visible.empty()) continue;  // interior or boundary point: not a hull vertex

        // Horizon ridges: (d-1)-subsets appearing in exactly one visible facet.
        std::map<std::vector<int>, int> ridge_count;
        for (int f : visible) {
            const std::vector<int>& fv = boundary[f].verts;
            for (int skip = 0; skip < d; ++skip) {
                std::vector<int> ridge;
                for (int i = 0; i < d; ++i)
                    if (i != skip) ridge.push_back(fv[i]);
                ridge_count[ridge]++;
            }
        }

        for (int f : visible) {
            std::vector<int> simplex = boundary[f].verts;
            simplex.push_back(q);
            tri.simplices.push_back(std::move(simplex));
        }

        std::vector<Facet> next;
        std::set<int> visible_set(visible.begin(), visible.end());
        for (int f = 0; f < static_cast<int>(boundary.size()); ++f)
            if (!visible_set.count(f)) next.push_back(std::move(boundary[f]));
        for (const auto& [ridge, cnt] : ridge_count) {
            if (cnt != 1) continue;
            std::vector<int> fv = ridge;
            fv.push_back(q);
            std::sort(fv.begin(), fv.end());
            next.push_back(make_facet(points, fv, centre));
        }
        boundary = std::move(next);
    }

    for (const auto& s : tri.simplices) {
        Rational det = edge_det(tri.points, s);
        tri.absdets.push_back(det < 0 ? -det : det);
    }
    return tri;
}

// ---------------------------------------------------------------------------
// Affine chart.
// ---------------------------------------------------------------------------
AffineChart affine_chart(const std::vector<VectorXq>& vertices) {
    if (vertices.empty()) throw ValidationError("affine chart of an empty vertex set");
    const int d = static_cast<int>(vertices[0].size());
    AffineChart chart;
    chart.origin = vertices[0];

    // Greedily extend a rational basis of the affine hull.
    std::vector<VectorXq> basis;
    for (const VectorXq& v : vertices) {
        VectorXq diff = v - chart.origin;
        MatrixXq E(static_cast<int>(basis.size()) + 1, d);
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (int j = 0; j < d; ++j) E(static_cast<int>(i), j) = basis[i](j);
        for (int j = 0; j < d; ++j) E(static_cast<int>(basis.size()), j) = diff(j);
        if (rank_q(E) == static_cast<int>(basis.size()) + 1) basis.push_back(diff);
    }
    chart.affine_dim = static_cast<int>(basis.size());
    chart.basis.resize(d, chart.affine_dim);
    for (int c = 0; c < chart.affine_dim; ++c)
        for (int j = 0; j < d; ++j) chart.basis(j, c) = basis[c](j);

    // Vertex coordinates: solve basis * u = v - origin via the Gram system
    // (basis has full column rank, so basis^T basis is invertible).
    MatrixXq G(chart.affine_dim, chart.affine_dim);
    for (int i = 0; i < chart.affine_dim; ++i)
        for (int j = 0; j < chart.affine_dim; ++j) {
            Rational s = 0;
            for (int t = 0; t < d; ++t) s += chart.basis(t, i) * chart.basis(t, j);
            G(i, j) = s;
        }
    chart.gram_det = det_q(G);

    for (const VectorXq& v : vertices) {
        VectorXq rhs(chart.affine_dim);
        for (int i = 0; i < chart.affine_dim; ++i) {
            Rational s = 0;
            for (int t = 0; t < d; ++t) s += chart.basis(t, i) * (v(t) - chart.origin(t));
            rhs(i) = s;
        }
        VectorXq u;
        if (chart.affine_dim > 0) {
            if (!solve_square_q(G, rhs, u))
                throw ValidationError("affine chart Gram system is singular");
            // Consistency: the vertex must lie on the affine hull.
            for (int t = 0; t < d; ++t) {
                Rational s = chart.origin(t);
                for (int i = 0; i < chart.affine_dim; ++i) s += chart.basis(t, i) * u(i);
                if (s != v(t))
                    throw ValidationError("vertex off the computed affine hull");
            }
        } else {
            u.resize(0);
        }
        chart.coords.push_back(std::move(u));
    }
    return chart;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
    if (q < 0) return std::nullopt;
    if (q == 0) return Rational(0);
    const Integer num = numerator(q), den = denominator(q);
    if (!mpz_perfect_square_p(num.backend().data()) ||
        !mpz_perfect_square_p(den.backend().data()))
        return std::nullopt;
    Integer rn, rd;
    mpz_sqrt(rn.backend().data(), num.backend().data());
    mpz_sqrt(rd.backend().data(), den.backend().data());
    return Rational(rn) / Rational(rd);
}

}  // namespace divlab
