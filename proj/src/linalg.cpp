#include "lyapcert/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lyapcert {

namespace {

void require_square(const Matrix& A, const char* who) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
  }
}

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Orthonormal complex basis maintained by modified Gram-Schmidt.  `insert`
/// returns true when the vector added a new direction (relative residual
/// above `tol`); the basis is capped at the ambient dimension.
class ComplexSpan {
public:
  ComplexSpan(Eigen::Index dim, double tol) : dim_(dim), tol_(tol) {}

  bool insert(ComplexVector v) {
    const double scale = v.norm();
    if (!(scale > 0.0) || !std::isfinite(scale)) return false;
    for (int pass = 0; pass < 2; ++pass) { // re-orthogonalize once for accuracy
      for (const auto& b : basis_) v -= b.dot(v) * b;
    }
    const double residual = v.norm();
    if (residual <= tol_ * scale) return false;
    basis_.push_back(v / residual);
    return true;
  }

  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(basis_.size()); }
  [[nodiscard]] bool full() const { return size() >= dim_; }
  [[nodiscard]] const std::vector<ComplexVector>& vectors() const { return basis_; }

private:
  Eigen::Index dim_;
  double tol_;
  std::vector<ComplexVector> basis_;
};

/// Real orthonormal basis of the span of the real and imaginary parts of a
/// complex basis.  Columns of the result span the realified subspace.
Matrix realify(const std::vector<ComplexVector>& basis, double tol) {
  if (basis.empty()) return {};
  const Eigen::Index d = basis.front().size();
  Matrix raw(d, 2 * static_cast<Eigen::Index>(basis.size()));
  Eigen::Index col = 0;
  for (const auto& b : basis) {
    raw.col(col++) = b.real();
    raw.col(col++) = b.imag();
  }
  // Rank-revealing extraction of an orthonormal basis.
  Eigen::ColPivHouseholderQR<Matrix> qr(raw);
  qr.setThreshold(tol);
  const Eigen::Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(d, rank);
  return q;
}

} // namespace

Matrix expm(const Matrix& A, double t) {
  require_square(A, "expm");
  if (t == 0.0) return Matrix::Identity(A.rows(), A.cols());
  Matrix scaled = t * A;
  Matrix result = scaled.exp();
  if (!result.allFinite()) {
    throw std::range_error("expm: result overflowed to non-finite values");
  }
  return result;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& A) {
  require_square(A, "eigenvalues");
  Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: QR iteration failed to converge");
  }
  const auto& vals = solver.eigenvalues();
  return {vals.data(), vals.data() + vals.size()};
}

double spectral_abscissa(const Matrix& A) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : eigenvalues(A)) best = std::max(best, lambda.real());
  return best;
}

double spectral_radius(const Matrix& A) {
  double best = 0.0;
  for (const auto& lambda : eigenvalues(A)) best = std::max(best, std::abs(lambda));
  return best;
}

SymmetricPartRange symmetric_part_range(const Matrix& A) {
  require_square(A, "symmetric_part_range");
  Matrix sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric_part_range: eigensolver failed");
  }
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

IrreducibilityResult is_irreducible(const std::vector<Matrix>& family, double tol) {
  if (family.empty()) {
    throw std::invalid_argument("is_irreducible: empty family");
  }
  const Eigen::Index d = family.front().rows();
  for (const auto& A : family) {
    require_square(A, "is_irreducible");
    if (A.rows() != d) {
      throw std::invalid_argument("is_irreducible: dimension mismatch in family");
    }
  }
  if (d == 1) return {true, {}}; // no proper nontrivial subspace exists

  // Candidate seeds: eigenvectors of each member and of each transpose.  An
  // eigenvector of A' detects a co-invariant subspace; its closure under the
  // transposed family yields, via orthogonal complement, a subspace invariant
  // under the original family.
  std::vector<ComplexMatrix> members(family.begin(), family.end());
  std::vector<ComplexMatrix> transposed;
  transposed.reserve(family.size());
  for (const auto& A : family) transposed.emplace_back(A.transpose());

  auto close_under = [&](const ComplexVector& seed,
                         const std::vector<ComplexMatrix>& fam) -> ComplexSpan {
    ComplexSpan span(d, tol);
    if (!span.insert(seed)) return span;
    // Breadth-first closure: multiply every basis vector by every member
    // until no new direction appears or the span is full.
    for (std::size_t head = 0; head < span.vectors().size() && !span.full(); ++head) {
      const ComplexVector v = span.vectors()[head];
      for (const auto& M : fam) {
        if (span.full()) break;
        span.insert(M * v);
      }
    }
    return span;
  };

  auto orthogonal_complement = [&](const ComplexSpan& span) {
    // Complete the span's basis to a full unitary basis; the trailing columns
    // form the complement.
    ComplexMatrix b(d, span.size());
    for (Eigen::Index i = 0; i < span.size(); ++i) b.col(i) = span.vectors()[static_cast<std::size_t>(i)];
    Eigen::HouseholderQR<ComplexMatrix> qr(b);
    ComplexMatrix q = qr.householderQ();
    std::vector<ComplexVector> comp;
    for (Eigen::Index i = span.size(); i < d; ++i) comp.push_back(q.col(i));
    return comp;
  };

  for (int use_transpose = 0; use_transpose < 2; ++use_transpose) {
    const auto& fam = use_transpose ? transposed : members;
    for (const auto& M : fam) {
      Eigen::ComplexEigenSolver<ComplexMatrix> solver(M);
      if (solver.info() != Eigen::Success) continue;
      for (Eigen::Index k = 0; k < d; ++k) {
        ComplexSpan span = close_under(solver.eigenvectors().col(k), fam);
        if (span.size() == 0 || span.full()) continue;
        // Proper nontrivial invariant subspace found.
        std::vector<ComplexVector> invariant_basis;
        if (use_transpose) {
          invariant_basis = orthogonal_complement(span);
        } else {
          invariant_basis = span.vectors();
        }
        IrreducibilityResult result;
        result.irreducible = false;
        result.witness = realify(invariant_basis, tol);
        return result;
      }
    }
  }
  return {true, {}};
}

} // namespace lyapcert
