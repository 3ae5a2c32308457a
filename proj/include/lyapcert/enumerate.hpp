#ifndef LYAPCERT_ENUMERATE_HPP
#define LYAPCERT_ENUMERATE_HPP

#include "lyapcert/system.hpp"

#include <cstdint>

namespace lyapcert {

/// Outcome of the periodic-schedule enumeration.
struct EnumerationResult {
  double bound = -kInfinity;    ///< best certified growth-rate lower bound
  FiniteSwitchingLaw best_law;  ///< schedule achieving the bound
  bool exhaustive = true;       ///< false when the evaluation budget ran out
  std::uint64_t laws_evaluated = 0;
};

/// Exhaustively enumerate periodizable schedules up to `max_legs` legs with
/// per-mode duration grids of `grid_points` samples (always containing both
/// window endpoints) and return the best growth-rate lower bound.  Schedules
/// equal up to cyclic rotation are evaluated once.  When the number of
/// evaluations would exceed `budget`, the search stops early and reports
/// `exhaustive == false`.
///
/// @throws InfiniteBoundError when some window upper bound is infinite.
/// @throws std::invalid_argument for max_legs < 2 or grid_points < 1.
[[nodiscard]] EnumerationResult best_periodic_lower_bound(const RestrictedSystem& sys,
                                                          int max_legs, int grid_points,
                                                          std::uint64_t budget = 2000000);

/// Two-mode fixture whose best periodic schedules occur at isolated periods:
/// a diagonal contraction diag(-1, -a) paired with a rotation, both with
/// lower switching bound pi and upper bound `upper`.  Useful for exercising
/// period-grid sensitivity in tests.
/// @throws std::invalid_argument unless a > 0 and upper > pi.
[[nodiscard]] RestrictedSystem discontinuous_period_fixture(double a, double upper);

/// Empirical (non-certified) growth estimate from random admissible
/// schedules; useful as a sanity probe against certified intervals.
struct GrowthProbeResult {
  double rate = -kInfinity; ///< best observed finite-horizon growth rate
  bool short_horizon = false; ///< some sample could not fit two legs
};

/// Sample `num_laws` random admissible schedules of total duration up to
/// `horizon` and report the largest normalized operator-norm growth rate.
/// The result is an indicator, not a bound: rates over finite horizons may
/// slightly exceed the true top rate.
[[nodiscard]] GrowthProbeResult growth_probe(const RestrictedSystem& sys, int num_laws,
                                             double horizon, std::uint64_t seed);

} // namespace lyapcert

#endif // LYAPCERT_ENUMERATE_HPP
