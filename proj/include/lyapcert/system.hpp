#ifndef LYAPCERT_SYSTEM_HPP
#define LYAPCERT_SYSTEM_HPP

#include "lyapcert/linalg.hpp"

#include <limits>
#include <vector>

namespace lyapcert {

/// A continuous-time linear switching system with per-mode duration windows.
///
/// Trajectories follow x' = A_j x while mode j is active; every maximal run
/// of mode j must last between lower[j] and upper[j] time units, and
/// consecutive runs use distinct modes.  upper[j] may be +infinity.
/// Mode indices are 0-based throughout the API; the on-disk formats are
/// 1-based and converted at the serialization boundary.
struct RestrictedSystem {
  std::vector<Matrix> modes;
  std::vector<double> lower;
  std::vector<double> upper;

  [[nodiscard]] int num_modes() const { return static_cast<int>(modes.size()); }
  [[nodiscard]] int dim() const {
    return modes.empty() ? 0 : static_cast<int>(modes.front().rows());
  }
  [[nodiscard]] bool all_upper_finite() const;

  /// Validate shape and window constraints (square equal-size modes,
  /// 0 < lower[j] < upper[j], at least two modes).
  /// @throws std::invalid_argument on violation.
  void validate() const;
};

/// System with every mode shifted by -alpha*I.  Shifting translates every
/// trajectory growth rate by exactly -alpha and preserves admissibility.
[[nodiscard]] RestrictedSystem shifted(const RestrictedSystem& sys, double alpha);

/// One leg of a switching schedule: run `mode` for `duration` time units.
struct Leg {
  int mode = 0;
  double duration = 0.0;
};

/// A finite switching schedule.  Admissible laws satisfy the per-mode
/// duration windows and have distinct consecutive modes.
struct FiniteSwitchingLaw {
  std::vector<Leg> legs;

  [[nodiscard]] bool empty() const { return legs.empty(); }
  [[nodiscard]] double total_time() const;
};

/// Fundamental matrix of a law: the product of the leg exponentials with the
/// most recent leg leftmost, so x(T) = matrix * x(0).
struct ModeProduct {
  Matrix matrix;
  double total_time = 0.0;
};

/// Whether the law respects the system's duration windows and alternation
/// rule (consecutive legs use distinct modes).
[[nodiscard]] bool is_admissible(const FiniteSwitchingLaw& law, const RestrictedSystem& sys);

/// Whether the law can be repeated periodically while staying admissible:
/// it must contain at least two legs and its first and last modes must
/// differ, so the wrap-around junction is also a genuine switch.
[[nodiscard]] bool is_periodizable(const FiniteSwitchingLaw& law);

/// Fundamental matrix of the law under the system.
/// @throws std::invalid_argument on out-of-range mode indices.
[[nodiscard]] ModeProduct product(const FiniteSwitchingLaw& law, const RestrictedSystem& sys);

/// Certified lower bound on the top growth rate obtained from a periodizable
/// admissible law: (1/T) * log(spectral radius) of its fundamental matrix.
/// @throws std::invalid_argument if the law is not admissible+periodizable.
[[nodiscard]] double law_lower_bound(const FiniteSwitchingLaw& law, const RestrictedSystem& sys);

/// One trajectory sample produced by `simulate`.
struct TrajectorySample {
  double t = 0.0;
  Vector x;
};

/// Sample the trajectory of the law from x0 on a uniform grid of the given
/// step, augmented with every switching instant (duplicates removed).
/// @throws std::invalid_argument on non-positive step or dimension mismatch.
[[nodiscard]] std::vector<TrajectorySample> simulate(const FiniteSwitchingLaw& law,
                                                     const RestrictedSystem& sys,
                                                     const Vector& x0, double step);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

} // namespace lyapcert

#endif // LYAPCERT_SYSTEM_HPP
