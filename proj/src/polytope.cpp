#include "lyapcert/polytope.hpp"

#include "lyapcert/errors.hpp"
#include "lyapcert/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lyapcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Assemble and solve the scaling program
///   maximize t0  s.t.  t0*x0 expressed over the hull generators
/// in simplex standard form (minimize -t0, equality rows, variables >= 0).
SimplexResult solve_scaling_program(const PolytopeHull& hull, const Vector& x0) {
  const int d = hull.dim();
  const int l = static_cast<int>(hull.vertices.size());
  const bool sym = hull.strategy == HullStrategy::Symmetrized;
  // Symmetrized: t0*x0 = sum_i (t_i - s_i) v_i, sum_i (t_i + s_i) = 1.
  // Positive:    t0*x0 = -z + sum_i t_i v_i,    sum_i t_i = 1,  z >= 0.
  const int nvar = sym ? 1 + 2 * l : 1 + l + d;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + 1, nvar);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvar);
  c(0) = -1.0; // maximize t0

  A.block(0, 0, d, 1) = x0;
  for (int i = 0; i < l; ++i) {
    A.block(0, 1 + i, d, 1) = -hull.vertices[static_cast<std::size_t>(i)];
    A(d, 1 + i) = 1.0;
  }
  if (sym) {
    for (int i = 0; i < l; ++i) {
      A.block(0, 1 + l + i, d, 1) = hull.vertices[static_cast<std::size_t>(i)];
      A(d, 1 + l + i) = 1.0;
    }
  } else {
    for (int k = 0; k < d; ++k) A(k, 1 + l + k) = 1.0;
  }
  b(d) = 1.0;
  return simplex_solve(A, b, c);
}

} // namespace

bool PolytopeHull::full_dimensional() const {
  if (vertices.empty()) return false;
  const int d = dim();
  if (strategy == HullStrategy::Positive) {
    for (int k = 0; k < d; ++k) {
      bool covered = false;
      for (const auto& v : vertices) {
        if (v(k) > 0.0) { covered = true; break; }
      }
      if (!covered) return false;
    }
    return true;
  }
  if (static_cast<int>(vertices.size()) < d) return false;
  Matrix span(d, static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) span.col(static_cast<Eigen::Index>(i)) = vertices[i];
  Eigen::ColPivHouseholderQR<Matrix> qr(span);
  qr.setThreshold(1e-10);
  return qr.rank() == d;
}

LpResult membership(const PolytopeHull& hull, const Vector& x0, double tol_strict) {
  LpResult out;
  if (hull.empty()) {
    return out; // t0 = 0: nothing is interior to an empty hull
  }
  if (hull.dim() != x0.size()) {
    throw std::invalid_argument("membership: point dimension does not match hull");
  }
  if (x0.isZero(0.0)) {
    out.t0 = kInf;
    out.interior = hull.full_dimensional();
    return out;
  }

  SimplexResult lp = solve_scaling_program(hull, x0);
  out.iterations = lp.iterations;
  switch (lp.status) {
    case SimplexStatus::Optimal:
      break;
    case SimplexStatus::Unbounded:
      if (hull.strategy == HullStrategy::Positive) {
        // x0 points into the downward recession cone; every scaling stays
        // inside, so the gauge is zero.
        out.t0 = kInf;
        out.interior = hull.full_dimensional();
        return out;
      }
      throw SolverFailure("membership: unbounded scaling program", lp.iterations);
    case SimplexStatus::Infeasible:
      throw SolverFailure("membership: scaling program reported infeasible", lp.iterations);
    case SimplexStatus::IterationLimit:
      throw SolverFailure("membership: simplex iteration limit reached", lp.iterations);
  }

  const int l = static_cast<int>(hull.vertices.size());
  out.t0 = std::max(0.0, -lp.objective);
  out.interior = out.t0 > 1.0 + tol_strict;
  out.boundary = std::abs(out.t0 - 1.0) <= tol_strict;
  out.plus_mult.resize(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) out.plus_mult[static_cast<std::size_t>(i)] = lp.x(1 + i);
  if (hull.strategy == HullStrategy::Symmetrized) {
    out.minus_mult.resize(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) out.minus_mult[static_cast<std::size_t>(i)] = lp.x(1 + l + i);
  }
  return out;
}

double point_norm(const PolytopeHull& hull, const Vector& x0) {
  LpResult r = membership(hull, x0);
  if (std::isinf(r.t0)) return 0.0;
  if (r.t0 <= 0.0) return kInf;
  return 1.0 / r.t0;
}

double operator_norm(const PolytopeHull& hull, const Matrix& A) {
  if (hull.empty()) return 0.0;
  if (A.rows() != hull.dim() || A.cols() != hull.dim()) {
    throw std::invalid_argument("operator_norm: matrix dimension does not match hull");
  }
  double best = 0.0;
  for (const auto& v : hull.vertices) {
    best = std::max(best, point_norm(hull, A * v));
    if (std::isinf(best)) break;
  }
  return best;
}

Matrix positive_part(const Matrix& A) { return A.cwiseMax(0.0); }

} // namespace lyapcert
