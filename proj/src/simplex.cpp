#include "lyapcert/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lyapcert {

namespace {

constexpr double kPivotTol = 1e-11;    // minimum magnitude of a pivot element
constexpr double kCostTol = 1e-9;      // reduced-cost threshold for entering
constexpr double kFeasTol = 1e-9;      // phase-one residual tolerance
constexpr double kDriveOutTol = 1e-8;  // minimum pivot when expelling artificials
constexpr int kStallLimit = 50;        // degenerate pivots before Bland's rule

} // namespace

SimplexResult simplex_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c, int max_iterations) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) {
    throw std::invalid_argument("simplex_solve: inconsistent dimensions");
  }
  if (max_iterations <= 0) max_iterations = 50 * (m + n + 10);

  const int total = n + m; // original variables plus one artificial per row
  // Tableau: m constraint rows, one objective row; last column is the RHS.
  Eigen::MatrixXd T(m + 1, total + 1);
  T.setZero();
  T.block(0, 0, m, n) = A;
  T.block(0, total, m, 1) = b;
  for (int r = 0; r < m; ++r) {
    if (T(r, total) < 0.0) T.row(r) = -T.row(r);
    T(r, n + r) = 1.0; // artificial basis
  }
  // basis[r] = column basic in row r; -1 marks a deactivated (redundant) row.
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) basis[r] = n + r;

  SimplexResult result;
  int iterations = 0;
  bool bland = false;
  int stall = 0;

  auto pivot = [&](int row, int col) {
    T.row(row) /= T(row, col);
    for (int r = 0; r <= m; ++r) {
      if (r == row) continue;
      const double factor = T(r, col);
      if (factor != 0.0) T.row(r) -= factor * T.row(row);
    }
    basis[row] = col;
  };

  // Simplex iterations on the current objective row; `allow` marks columns
  // permitted to enter.  Returns Optimal, Unbounded, or IterationLimit.
  auto iterate = [&](const std::vector<char>& allow) -> SimplexStatus {
    while (true) {
      if (iterations >= max_iterations) return SimplexStatus::IterationLimit;
      // --- entering column ---
      int col = -1;
      if (bland) {
        for (int j = 0; j < total; ++j) {
          if (allow[j] && T(m, j) < -kCostTol) { col = j; break; }
        }
      } else {
        double best = -kCostTol;
        for (int j = 0; j < total; ++j) {
          if (allow[j] && T(m, j) < best) { best = T(m, j); col = j; }
        }
      }
      if (col < 0) return SimplexStatus::Optimal;
      // --- leaving row (minimum-ratio test, lowest basis index on ties) ---
      int row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        if (basis[r] < 0) continue;
        const double entry = T(r, col);
        if (entry <= kPivotTol) continue;
        const double ratio = T(r, total) / entry;
        if (ratio < best_ratio - 1e-15) {
          best_ratio = ratio;
          row = r;
        } else if (ratio <= best_ratio + 1e-15 && row >= 0 && basis[r] < basis[row]) {
          row = r;
        }
      }
      if (row < 0) return SimplexStatus::Unbounded;
      const double before = T(m, total);
      pivot(row, col);
      ++iterations;
      if (!bland) {
        const double gain = T(m, total) - before; // grows as the objective falls
        if (gain <= 1e-13 * (1.0 + std::abs(before))) {
          if (++stall >= kStallLimit) bland = true;
        } else {
          stall = 0;
        }
      }
    }
  };

  // ---- Phase one: minimize the sum of artificial variables -----------------
  // Objective row carries reduced costs; price out the all-artificial basis.
  for (int j = 0; j < total; ++j) {
    if (j < n) {
      double s = 0.0;
      for (int r = 0; r < m; ++r) s += T(r, j);
      T(m, j) = -s;
    } else {
      T(m, j) = 0.0;
    }
  }
  {
    double s = 0.0;
    for (int r = 0; r < m; ++r) s += T(r, total);
    T(m, total) = -s; // stores -(phase-one objective)
  }
  std::vector<char> allow(total, 1);
  SimplexStatus status = iterate(allow);
  if (status == SimplexStatus::IterationLimit) {
    result.status = status;
    result.iterations = iterations;
    return result;
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (-T(m, total) > kFeasTol * scale) {
    result.status = SimplexStatus::Infeasible;
    result.iterations = iterations;
    return result;
  }

  // Expel any artificial still basic (its value is within the feasibility
  // tolerance of zero).  Rows without a usable pivot among the original
  // columns are redundant and are deactivated.
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    T(r, total) = 0.0; // snap the near-zero basic value exactly to zero
    int best_col = -1;
    double best_abs = kDriveOutTol;
    for (int j = 0; j < n; ++j) {
      const double a = std::abs(T(r, j));
      if (a > best_abs) { best_abs = a; best_col = j; }
    }
    if (best_col >= 0) {
      pivot(r, best_col);
    } else {
      basis[r] = -1;
      T.row(r).setZero();
    }
  }

  // ---- Phase two: the original objective -----------------------------------
  for (int j = n; j < total; ++j) allow[j] = 0;
  T.row(m).setZero();
  for (int j = 0; j < n; ++j) T(m, j) = c(j);
  double obj = 0.0;
  for (int r = 0; r < m; ++r) {
    const int bj = basis[r];
    if (bj >= 0 && bj < n && c(bj) != 0.0) {
      T.row(m) -= c(bj) * T.row(r);
      obj += c(bj) * T(r, total);
    }
  }
  T(m, total) = -obj;
  bland = false;
  stall = 0;
  status = iterate(allow);
  result.status = status;
  result.iterations = iterations;
  if (status != SimplexStatus::Optimal) return result;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) {
    if (basis[r] >= 0 && basis[r] < n) x(basis[r]) = T(r, total);
  }
  result.x = x;
  result.objective = c.dot(x);
  return result;
}

} // namespace lyapcert
