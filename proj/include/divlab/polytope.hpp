// Exact rational polytope machinery: vertex enumeration for down-sets
// {t >= 0, A t <= ub} and fibers {v >= 0, A v = rhs}, a placing (incremental
// beneath-beyond) triangulation with exact orientation tests, and the affine
// chart used to measure lower-dimensional fibers.
#pragma once

#include "divlab/numeric.hpp"

#include <optional>
#include <vector>

namespace divlab {

// {t in R^d : t >= 0, A t <= ub}; columns of A index the coordinates of t.
struct HPolytope {
    MatrixXq A;
    VectorXq ub;
    int dim() const { return static_cast<int>(A.cols()); }
};

// {v in R^d : v >= 0, A v = rhs}.
struct FiberPolytope {
    MatrixXq A;
    VectorXq rhs;
    int dim() const { return static_cast<int>(A.cols()); }
};

// All vertices, deduplicated, in ascending lexicographic order.  Basic
// solutions are enumerated exhaustively; fine at the dimensions this tool
// targets (the log-power cap keeps slices small).
std::vector<VectorXq> vertices_of(const HPolytope& poly);
std::vector<VectorXq> vertices_of(const FiberPolytope& poly);

// Componentwise upper bounds max t_r over the down-set (simple ratio LP).
// Throws UnboundedOrDegenerate when a coordinate is unbounded.
VectorXq coordinate_bounds(const HPolytope& poly);

// A triangulation of conv(points): simplices index into `points`, and each
// simplex stores |det| of its edge matrix (volume = absdet / d!).
struct Triangulation {
    std::vector<VectorXq> points;
    std::vector<std::vector<int>> simplices;
    std::vector<Rational> absdets;

    Rational volume() const {
        Rational total = 0;
        for (const Rational& d : absdets) total += d;
        Integer fact = 1;
        const int dim = points.empty() ? 0 : static_cast<int>(points[0].size());
        for (int i = 2; i <= dim; ++i) fact *= i;
        return total / Rational(fact);
    }
};

// Placing triangulation of a full-dimensional point configuration.  Points
// must affinely span their ambient space; interior (non-extreme) points are
// skipped.  Deterministic: points are processed in sorted order.
Triangulation triangulate(std::vector<VectorXq> points);

// Exact affine chart for a (possibly lower-dimensional) vertex set: an
// origin, a rational basis of the affine hull, the coordinates of each
// vertex in that basis, and the Gram determinant of the basis.
struct AffineChart {
    VectorXq origin;
    MatrixXq basis;                 // d x kappa, columns span the hull
    std::vector<VectorXq> coords;   // vertex coordinates in the basis
    Rational gram_det;              // det(basis^T basis)
    int affine_dim = 0;
};

AffineChart affine_chart(const std::vector<VectorXq>& vertices);

// sqrt of a nonnegative rational when it is rational; nullopt otherwise.
std::optional<Rational> exact_sqrt(const Rational& q);

}  // namespace divlab
