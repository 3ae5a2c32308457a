#ifndef LYAPCERT_POLYTOPE_HPP
#define LYAPCERT_POLYTOPE_HPP

#include "lyapcert/linalg.hpp"

#include <vector>

namespace lyapcert {

/// Hull convention applied to a stored vertex list.
///
/// Symmetrized: the convex hull of the vertices and their negatives, i.e.
///   { sum_i c_i v_i : sum_i |c_i| <= 1 }.
/// Positive: the hull within the nonnegative orthant together with its
/// downward closure,
///   { x : x <= y (componentwise) for some y in conv{v_i}, v_i >= 0 }.
enum class HullStrategy { Symmetrized, Positive };

/// A polytope given by generator vertices and a hull convention.  The vertex
/// list stores one representative per symmetric pair under the symmetrized
/// convention ("half count").
struct PolytopeHull {
  std::vector<Vector> vertices;
  HullStrategy strategy = HullStrategy::Symmetrized;

  [[nodiscard]] int dim() const {
    return vertices.empty() ? 0 : static_cast<int>(vertices.front().size());
  }
  [[nodiscard]] bool empty() const { return vertices.empty(); }

  /// Whether the hull has nonempty interior: full vertex rank for the
  /// symmetrized convention; for the positive convention, every coordinate
  /// must be strictly positive on some vertex.
  [[nodiscard]] bool full_dimensional() const;
};

/// Outcome of the membership linear program for a query point x0.
///
/// t0 is the largest scaling that keeps t0*x0 inside the hull, so x0 lies in
/// the interior exactly when t0 > 1 (up to the strict-containment tolerance)
/// and the gauge norm of x0 equals 1/t0.
struct LpResult {
  double t0 = 0.0;
  bool interior = false;
  bool boundary = false; ///< |t0 - 1| within the strict-containment band
  int iterations = 0;
  /// Certificate multipliers expressing t0*x0 over the vertices: for the
  /// symmetrized convention, coefficients of +v_i and of -v_i; for the
  /// positive convention only the +v_i coefficients are used.
  std::vector<double> plus_mult;
  std::vector<double> minus_mult;
};

inline constexpr double kStrictTol = 1e-9;

/// Solve the scaling program for x0 against the hull.
///
/// Conventions: an empty hull yields t0 = 0 (nothing is interior); x0 == 0
/// yields t0 = +infinity with `interior` equal to full-dimensionality.
/// Boundary queries (|t0 - 1| <= tol_strict) report `boundary` and are NOT
/// classified interior, so callers keep such points.
///
/// @throws SolverFailure if the linear program does not converge.
[[nodiscard]] LpResult membership(const PolytopeHull& hull, const Vector& x0,
                                  double tol_strict = kStrictTol);

/// Gauge (Minkowski) norm of x0 with respect to the hull: 1/t0, with
/// point_norm(hull, 0) == 0 and +infinity when x0 cannot be scaled into the
/// hull at all.
[[nodiscard]] double point_norm(const PolytopeHull& hull, const Vector& x0);

/// Induced operator norm of A, evaluated as the maximum gauge norm of the
/// images of the hull vertices.  Exact for the symmetrized convention; for
/// the positive convention it is exact whenever A is entrywise nonnegative
/// (which preserves the componentwise order the hull is built on).
[[nodiscard]] double operator_norm(const PolytopeHull& hull, const Matrix& A);

/// Entrywise positive part max(A, 0).  Composing with `operator_norm` gives
/// a sound upper bound on the positive-hull operator gauge of a sign-mixed
/// matrix: for 0 <= x <= y one has Ax <= A⁺x <= A⁺y, and the downward-closed
/// gauge is monotone, so the vertex maximum of A⁺ dominates the gauge of Ax
/// over the whole hull.
[[nodiscard]] Matrix positive_part(const Matrix& A);

} // namespace lyapcert

#endif // LYAPCERT_POLYTOPE_HPP
