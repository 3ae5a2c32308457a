#ifndef LYAPCERT_LINALG_HPP
#define LYAPCERT_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace lyapcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential e^{tA}, evaluated by scaling-and-squaring with Pade
/// approximants.  Exact identity is returned for t == 0.  Accuracy is at the
/// level of a few ulps relative to the result norm for well-scaled inputs.
///
/// @throws std::range_error if the result overflows to non-finite values.
[[nodiscard]] Matrix expm(const Matrix& A, double t);

/// All eigenvalues of a real square matrix.
[[nodiscard]] std::vector<std::complex<double>> eigenvalues(const Matrix& A);

/// Largest real part among the eigenvalues of A.  This is the exponential
/// growth rate of the single-mode flow x' = Ax.
[[nodiscard]] double spectral_abscissa(const Matrix& A);

/// Largest eigenvalue modulus of A.
[[nodiscard]] double spectral_radius(const Matrix& A);

/// Smallest and largest eigenvalue of the symmetric part (A + A')/2.  These
/// are the classical logarithmic-norm bounds: for every solution of x' = Ax,
///   ||x(0)|| e^{lo t} <= ||x(t)|| <= ||x(0)|| e^{hi t}   (Euclidean norm).
struct SymmetricPartRange {
  double lo = 0.0;
  double hi = 0.0;
};
[[nodiscard]] SymmetricPartRange symmetric_part_range(const Matrix& A);

/// Result of the common-invariant-subspace test for a matrix family.
///
/// The test is run over the complex field: a family is reducible here when
/// some proper nontrivial complex subspace is invariant under every member.
/// In particular a single matrix of dimension >= 2 is always reducible (any
/// eigenvector spans an invariant line).  When a subspace is found, `witness`
/// holds an orthonormal real basis of its realification (the real span of the
/// complex basis vectors' real and imaginary parts).
struct IrreducibilityResult {
  bool irreducible = false;
  Matrix witness; ///< d x k real basis of a common invariant subspace; empty when irreducible.
};

/// Decide whether the family has no common proper nontrivial invariant
/// subspace over the complex numbers.  `tol` is the relative containment
/// tolerance used when closing candidate subspaces under the family.
///
/// @throws std::invalid_argument on an empty family or mismatched dimensions.
[[nodiscard]] IrreducibilityResult is_irreducible(const std::vector<Matrix>& family,
                                                  double tol = 1e-9);

} // namespace lyapcert

#endif // LYAPCERT_LINALG_HPP
