#ifndef LYAPCERT_ERRORS_HPP
#define LYAPCERT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lyapcert {

/// Raised when an iterative numerical routine fails to converge.  Carries the
/// iteration count at which the routine gave up so callers can report it.
class SolverFailure : public std::runtime_error {
public:
  SolverFailure(const std::string& what, int iterations)
      : std::runtime_error(what + " (after " + std::to_string(iterations) +
                           " iterations)"),
        iterations_(iterations) {}

  [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
  int iterations_ = 0;
};

/// Raised when an operation requires every switching-interval upper bound to
/// be finite but the system carries an unbounded interval.  The usual fix is
/// to first reduce the system with the cut-tail simplification.
class InfiniteBoundError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace lyapcert

#endif // LYAPCERT_ERRORS_HPP
