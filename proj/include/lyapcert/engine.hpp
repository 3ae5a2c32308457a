#ifndef LYAPCERT_ENGINE_HPP
#define LYAPCERT_ENGINE_HPP

#include "lyapcert/polytope.hpp"
#include "lyapcert/system.hpp"

#include <string>
#include <vector>

namespace lyapcert {

/// Tuning knobs for the invariant-polytope search.
struct EngineConfig {
  int N = 10;             ///< duration-grid refinements per mode window
  double delta = 1e-3;    ///< halt threshold: stop once mu > -delta
  int K_max = 100;        ///< iteration cap before interrupting
  HullStrategy hull = HullStrategy::Symmetrized;
  int start_space = -1;   ///< initial space index; -1 selects automatically
  Vector start_point;     ///< initial point; empty selects automatically
  bool parallel = false;  ///< batch semantics: test an iteration's candidates
                          ///< against the iteration-start hulls instead of the
                          ///< growing ones (same certificates, more vertices)
};

/// Duration-grid discretization of a restricted system: for each mode j the
/// grid step tau_j = (upper_j - lower_j)/N and the generator matrices
/// e^{(lower_j + s*tau_j) A_j} for s = 0..N.
struct DiscretizedFamily {
  int N = 0;
  std::vector<double> tau;
  std::vector<std::vector<Matrix>> generators; ///< [mode][grid index]
  IrreducibilityResult irreducibility;         ///< verdict for the flattened generator family
  std::string warning;                         ///< empty when nothing to report

  [[nodiscard]] std::vector<Matrix> flattened() const;
};

/// Build the duration-grid discretization.
/// @throws InfiniteBoundError when some upper window bound is infinite.
/// @throws std::invalid_argument on an invalid system or N < 1.
[[nodiscard]] DiscretizedFamily discretize(const RestrictedSystem& sys, int N);

/// One stored switching point of the search.  Points form a forest: walking
/// `parent` links recovers the switching history back to the start point,
/// and `cumulative` is the product of the generators along that history, so
/// point == cumulative * start_point up to roundoff.
struct VertexRecord {
  Vector point;
  int space = 0;          ///< index of the space the point lives in
  double birth_time = 0.0;
  int parent = -1;        ///< arena index of the predecessor; -1 for the root
  int grid_index = -1;    ///< duration-grid index of the incoming leg; -1 for the root
  Matrix cumulative;
};

/// One polytope per space.
struct MultiPolytope {
  std::vector<PolytopeHull> spaces;
};

enum class TerminationCase {
  UnstableCandidate,   ///< a schedule with growth rate above -delta was found
  LyapunovCertificate, ///< the polytopes stabilized: invariant multinorm found
  Interrupted,         ///< iteration cap reached; two-sided estimate returned
};

/// Full outcome of one invariant-polytope search.
struct AlgorithmReport {
  TerminationCase termination = TerminationCase::Interrupted;
  double mu = 0.0;          ///< best certified growth rate of a found schedule
  FiniteSwitchingLaw mu_law;///< the schedule achieving mu (may be empty)
  double nu = 0.0;          ///< certified decay margin of the multinorm
  bool nu_valid = false;    ///< whether nu could be certified at this N
  double gamma = 0.0;       ///< escape-norm factor (Interrupted runs only)
  int iterations = 0;
  MultiPolytope polytopes;
  std::vector<int> vertex_counts;       ///< per space (one per symmetric pair)
  std::vector<double> mode_norm_bounds; ///< per-mode certified bound on the
                                        ///< squared-generator gauge used by nu
  EngineConfig config_used;
  double alpha_shift = 0.0; ///< spectral shift the run was performed under
  std::string warning;
};

/// Decay margin certified by a stabilized polytope family:
///   nu = -(1/m) * log(1 - (M - m)^2 * a2 / (8 N^2))
/// where a2 bounds the polytope gauge of the squared mode matrix.
/// @throws std::domain_error when the argument of the logarithm is not
///         positive (the grid is too coarse for this bound).
[[nodiscard]] double nu_bound(double m, double M, int N, double a2);

/// Run the invariant-polytope search on the system as given.
/// @throws InfiniteBoundError when some upper window bound is infinite.
[[nodiscard]] AlgorithmReport run_multinorm_search(const RestrictedSystem& sys,
                                                   const EngineConfig& config);

/// Summary of one bisection probe.
struct ProbeSummary {
  double alpha = 0.0;
  TerminationCase termination = TerminationCase::Interrupted;
  double mu = 0.0;
  double nu = 0.0;
  bool nu_valid = false;
  int iterations = 0;
};

/// Two-sided certified interval for the top growth rate.
struct SigmaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool converged = false;
  int probes = 0;
  std::vector<ProbeSummary> history;
  AlgorithmReport final_certificate; ///< last stabilizing run (when any)
  bool has_certificate = false;
};

/// Bisect on the spectral shift to bracket the top growth rate within
/// `target_width`.  The initial bracket comes from the logarithmic-norm
/// bounds of the modes; `prior_lower` (e.g. from schedule enumeration) can
/// pre-tighten it from below.
[[nodiscard]] SigmaInterval bisect_sigma(const RestrictedSystem& sys, const EngineConfig& config,
                                         double target_width,
                                         double prior_lower = -kInfinity,
                                         int max_probes = 60);

/// Independent audit of a claimed certificate: checks on a duration grid
/// that every polytope vertex, propagated through any admissible leg of the
/// nu-shifted system, lands strictly inside the target polytope.
struct AuditResult {
  bool pass = false;
  double worst_margin = 0.0; ///< 1 - (largest gauge norm observed)
  int from_space = -1;       ///< offender location when the audit fails
  int to_space = -1;
  double t = 0.0;
  Vector point;
};
[[nodiscard]] AuditResult audit_multinorm(const RestrictedSystem& sys,
                                          const MultiPolytope& polytopes, double nu,
                                          int grid_points = 41);

} // namespace lyapcert

#endif // LYAPCERT_ENGINE_HPP
