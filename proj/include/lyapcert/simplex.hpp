#ifndef LYAPCERT_SIMPLEX_HPP
#define LYAPCERT_SIMPLEX_HPP

#include <Eigen/Dense>

namespace lyapcert {

enum class SimplexStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  double objective = 0.0;  ///< value of the minimization objective at the solution
  Eigen::VectorXd x;       ///< primal solution (valid when status == Optimal)
  int iterations = 0;      ///< total pivots across both phases
};

/// Solve  min c'x  subject to  A x = b,  x >= 0  with a dense two-phase
/// tableau simplex method.
///
/// The pivot rule is deterministic: Dantzig pricing (most negative reduced
/// cost) with lowest-index tie-breaking, switching permanently to Bland's
/// rule when the objective stalls, which guarantees termination.  Rows with
/// negative right-hand side are negated up front; redundant rows discovered
/// in phase one are deactivated.
///
/// @param max_iterations  pivot cap; 0 selects an automatic cap scaled by the
///                        problem size.
SimplexResult simplex_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c, int max_iterations = 0);

} // namespace lyapcert

#endif // LYAPCERT_SIMPLEX_HPP
