#include "lyapcert/engine.hpp"

#include "lyapcert/enumerate.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace lyapcert;

namespace {

RestrictedSystem two_diag_system() {
  RestrictedSystem sys;
  Matrix A1 = Matrix::Zero(2, 2), A2 = Matrix::Zero(2, 2);
  A1(0, 0) = 1.0;
  A1(1, 1) = -3.0;
  A2(0, 0) = -3.0;
  A2(1, 1) = 1.0;
  sys.modes = {A1, A2};
  sys.lower = {1.0, 1.0};
  sys.upper = {2.0, 2.0};
  return sys;
}

RestrictedSystem cross_coupled_system(double upper) {
  RestrictedSystem sys;
  Matrix A1(2, 2), A2(2, 2);
  A1 << -0.3, 0.5, 0.2, -0.4;
  A2 << -0.6, 0.0, 0.0, 1.0;
  sys.modes = {A1, A2};
  sys.lower = {1.0, 1.0};
  sys.upper = {upper, upper};
  return sys;
}

RestrictedSystem scalar_pair() {
  RestrictedSystem sys;
  Matrix A(1, 1), B(1, 1);
  A << 1.0;
  B << -3.0;
  sys.modes = {A, B};
  sys.lower = {1.0, 1.0};
  sys.upper = {2.0, 2.0};
  return sys;
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("discretization lays out the duration grid per mode") {
  const auto sys = cross_coupled_system(2.0);
  const auto fam = discretize(sys, 10);
  CHECK(fam.N == 10);
  REQUIRE(fam.tau.size() == 2);
  CHECK(fam.tau[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(fam.tau[1] == doctest::Approx(0.1).epsilon(1e-15));
  REQUIRE(fam.generators.size() == 2);
  CHECK(fam.generators[0].size() == 11);
  CHECK(fam.generators[1].size() == 11);
  CHECK(fam.flattened().size() == 22);
  // Generator s of mode j is the flow over duration lower_j + s*tau_j.
  for (int j = 0; j < 2; ++j) {
    for (int s : {0, 4, 10}) {
      const Matrix expect = expm(sys.modes[static_cast<std::size_t>(j)], 1.0 + 0.1 * s);
      const Matrix got = fam.generators[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
      CHECK((got - expect).norm() < 1e-12 * expect.norm());
    }
  }
  CHECK(fam.irreducibility.irreducible);
  CHECK(fam.warning.empty());
}

TEST_CASE("discretization with a single refinement keeps only the endpoints") {
  const auto sys = cross_coupled_system(2.0);
  const auto fam = discretize(sys, 1);
  REQUIRE(fam.generators[0].size() == 2);
  const Matrix lo = expm(sys.modes[0], 1.0);
  const Matrix hi = expm(sys.modes[0], 2.0);
  CHECK((fam.generators[0][0] - lo).norm() < 1e-12 * lo.norm());
  CHECK((fam.generators[0][1] - hi).norm() < 1e-12 * hi.norm());
}

TEST_CASE("discretization flags reducible generator families") {
  const auto sys = two_diag_system(); // common eigenvectors e1, e2
  const auto fam = discretize(sys, 4);
  CHECK_FALSE(fam.irreducibility.irreducible);
  CHECK(!fam.warning.empty());
}

TEST_CASE("discretization input validation") {
  auto sys = cross_coupled_system(2.0);
  CHECK_THROWS_AS((void)discretize(sys, 0), std::invalid_argument);
  sys.upper[1] = kInfinity;
  CHECK_THROWS_AS((void)discretize(sys, 10), InfiniteBoundError);
}

TEST_CASE("nu bound evaluates its closed form and honors its domain") {
  CHECK(nu_bound(1.0, 2.0, 10, 1.0) ==
        doctest::Approx(-std::log1p(-1.0 / 800.0)).epsilon(1e-14));
  CHECK(nu_bound(1.0, 2.0, 10, 0.0) == 0.0);
  // Quadratic decay in the grid refinement: nu(2N)/nu(N) -> 1/4.
  const double ratio = nu_bound(1.0, 2.0, 100, 2.0) / nu_bound(1.0, 2.0, 50, 2.0);
  CHECK(ratio == doctest::Approx(0.25).epsilon(1e-4));
  // (M-m)^2 * a2 >= 8N^2 leaves the logarithm's domain.
  CHECK_THROWS_AS((void)nu_bound(1.0, 2.0, 1, 8.0), std::domain_error);
}

TEST_CASE("a coarse growth threshold turns the exact periodic law into a witness") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 10;
  cfg.delta = 0.5; // anything above 1/3 makes the decaying law a witness
  const auto rep = run_multinorm_search(sys, cfg);
  CHECK(rep.termination == TerminationCase::UnstableCandidate);
  // The search stops at the first witness above the threshold, which need
  // not be the best schedule; it must still respect both sides.
  CHECK(rep.mu > -cfg.delta);
  CHECK(rep.mu <= -1.0 / 3.0 + 1e-9); // cannot beat the true top rate
  REQUIRE(!rep.mu_law.empty());
  CHECK(is_admissible(rep.mu_law, sys));
  CHECK(is_periodizable(rep.mu_law));
  // The reported schedule really certifies the reported rate.
  CHECK(law_lower_bound(rep.mu_law, sys) == doctest::Approx(rep.mu).epsilon(1e-12));
}

TEST_CASE("a tight threshold yields a certificate whose audit passes") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 10;
  cfg.delta = 1e-3;
  const auto rep = run_multinorm_search(sys, cfg);
  REQUIRE(rep.termination == TerminationCase::LyapunovCertificate);
  REQUIRE(rep.nu_valid);
  CHECK(rep.nu > 0.0);
  CHECK(rep.mu <= -1.0 / 3.0 + 1e-9); // no found schedule can beat the true rate
  REQUIRE(rep.polytopes.spaces.size() == 2);
  for (const auto& hull : rep.polytopes.spaces) CHECK(hull.full_dimensional());
  // Independent a-posteriori check of the decay margin.
  const auto audit = audit_multinorm(sys, rep.polytopes, rep.nu);
  CHECK(audit.pass);
  CHECK(audit.worst_margin > 0.0);
}

TEST_CASE("vertex counts report the stored generators per space") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 10;
  const auto rep = run_multinorm_search(sys, cfg);
  REQUIRE(rep.vertex_counts.size() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(rep.vertex_counts[j] ==
          static_cast<int>(rep.polytopes.spaces[j].vertices.size()));
    CHECK(rep.vertex_counts[j] >= 1);
  }
}

TEST_CASE("the brute-force lower bound never exceeds a certified upper bound") {
  // Shift the growing system until it certifiably decays, then compare
  // against the independent schedule enumeration on the unshifted system.
  const auto sys = cross_coupled_system(2.5);
  const double alpha = 0.7;
  EngineConfig cfg;
  cfg.N = 8;
  const auto rep = run_multinorm_search(shifted(sys, alpha), cfg);
  REQUIRE(rep.termination == TerminationCase::LyapunovCertificate);
  REQUIRE(rep.nu_valid);
  const auto oracle = best_periodic_lower_bound(sys, 4, 3);
  CHECK(oracle.bound - alpha <= rep.nu + 1e-9);
}

TEST_CASE("interrupted runs report the escape factor and relaxed bounds") {
  const auto sys = cross_coupled_system(2.5);
  EngineConfig cfg;
  cfg.N = 8;
  cfg.K_max = 2; // freeze the search before the polytopes stabilize
  const auto rep = run_multinorm_search(shifted(sys, 0.63), cfg);
  REQUIRE(rep.termination == TerminationCase::Interrupted);
  REQUIRE(std::isfinite(rep.gamma));
  CHECK(rep.gamma >= 1.0 - 1e-9); // surviving points sit outside the unit ball
  REQUIRE(rep.nu_valid);
  CHECK(rep.nu > 0.0);
  // The relaxed margin must be weaker than the one a completed run certifies.
  EngineConfig full = cfg;
  full.K_max = 100;
  const auto done = run_multinorm_search(shifted(sys, 0.63), full);
  REQUIRE(done.termination == TerminationCase::LyapunovCertificate);
  CHECK(done.nu <= rep.nu + 1e-12);
}

TEST_CASE("an immediately frozen run reports a vacuous escape factor honestly") {
  const auto sys = cross_coupled_system(2.5);
  EngineConfig cfg;
  cfg.N = 8;
  cfg.K_max = 1; // the hulls cannot even span their spaces yet
  const auto rep = run_multinorm_search(shifted(sys, 0.63), cfg);
  REQUIRE(rep.termination == TerminationCase::Interrupted);
  CHECK(std::isinf(rep.gamma)); // a survivor escapes the hull's span entirely
  CHECK_FALSE(rep.nu_valid);    // so no upper bound is claimed
}

TEST_CASE("bisection brackets the scalar alternation rate") {
  const auto sys = scalar_pair();
  EngineConfig cfg;
  cfg.N = 10;
  const auto interval = bisect_sigma(sys, cfg, 0.04);
  CHECK(interval.converged);
  CHECK(interval.hi - interval.lo <= 0.04 + 1e-12);
  CHECK(interval.lo <= -1.0 / 3.0 + 1e-9);
  CHECK(interval.hi >= -1.0 / 3.0 - 1e-9);
  CHECK(interval.probes == static_cast<int>(interval.history.size()));
}

TEST_CASE("bisection is equivariant under spectral shifts") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 6;
  const auto base = bisect_sigma(sys, cfg, 0.05);
  const auto moved = bisect_sigma(shifted(sys, 1.0), cfg, 0.05);
  CHECK(moved.lo == doctest::Approx(base.lo - 1.0).epsilon(1e-9));
  CHECK(moved.hi == doctest::Approx(base.hi - 1.0).epsilon(1e-9));
}

TEST_CASE("bisection accepts a prior lower bound without losing the answer") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 8;
  const auto interval = bisect_sigma(sys, cfg, 0.05, -0.35);
  CHECK(interval.lo >= -0.35 - 1e-12);
  CHECK(interval.lo <= -1.0 / 3.0 + 1e-9);
  CHECK(interval.hi >= -1.0 / 3.0 - 1e-9);
}

TEST_CASE("the final certificate of a bisection audits cleanly") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 8;
  const auto interval = bisect_sigma(sys, cfg, 0.05);
  REQUIRE(interval.has_certificate);
  const auto& rep = interval.final_certificate;
  REQUIRE(rep.termination == TerminationCase::LyapunovCertificate);
  const auto audit =
      audit_multinorm(shifted(sys, rep.alpha_shift), rep.polytopes, rep.nu);
  CHECK(audit.pass);
}

TEST_CASE("the audit rejects a non-invariant ball on an expanding mode") {
  const auto sys = two_diag_system();
  // Cross-polytopes are not invariant here: mode one expands the first axis.
  MultiPolytope polytopes;
  for (int j = 0; j < 2; ++j) {
    PolytopeHull hull;
    hull.strategy = HullStrategy::Symmetrized;
    Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;
    hull.vertices = {e1, e2};
    polytopes.spaces.push_back(hull);
  }
  const auto audit = audit_multinorm(sys, polytopes, 0.0);
  CHECK_FALSE(audit.pass);
  CHECK(audit.worst_margin < 0.0);
  CHECK(audit.from_space >= 0);
  CHECK(audit.to_space >= 0);
  CHECK(audit.point.size() == 2);
}

TEST_CASE("degenerate certificates are refused a global decay margin") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 4;
  Vector e1 = Vector::Zero(2);
  e1(0) = 1.0; // a common eigenvector: the search never leaves its span
  cfg.start_point = e1;
  const auto rep = run_multinorm_search(shifted(sys, 1.2), cfg);
  if (rep.termination == TerminationCase::LyapunovCertificate) {
    CHECK_FALSE(rep.nu_valid);
    CHECK(!rep.warning.empty());
  }
}

TEST_CASE("chord bound: the interior of a flow chord is controlled by its ends") {
  // For x' = Ax on [0, tau]:
  //   |x(t)|_P <= (1 - tau^2 |A^2|_P / 8)^{-1} max(|x(0)|_P, |x(tau)|_P).
  std::mt19937 rng(71u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 1000) {
    const int d = 2 + static_cast<int>(rng() % 2u);
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = u(rng);
    A -= (spectral_abscissa(A) + 0.2) * Matrix::Identity(d, d); // stable
    PolytopeHull P;
    P.strategy = HullStrategy::Symmetrized;
    for (int i = 0; i < d + 2; ++i) {
      Vector v(d);
      for (int k = 0; k < d; ++k) v(k) = u(rng);
      P.vertices.push_back(v);
    }
    if (!P.full_dimensional()) continue;
    const double a2 = operator_norm(P, A * A);
    if (!std::isfinite(a2)) continue;
    const double tau = std::min(0.5, 1.0 / std::sqrt(a2 + 1e-12));
    const double slack = 1.0 - tau * tau * a2 / 8.0;
    REQUIRE(slack > 0.0);
    Vector x0(d);
    for (int k = 0; k < d; ++k) x0(k) = u(rng);
    const double end0 = point_norm(P, x0);
    const double end1 = point_norm(P, expm(A, tau) * x0);
    const double cap = std::max(end0, end1) / slack;
    for (double frac : {0.21, 0.5, 0.77}) {
      const double mid = point_norm(P, expm(A, frac * tau) * x0);
      CHECK(mid <= cap * (1.0 + 1e-9));
      ++done;
    }
  }
}

TEST_CASE("reports are byte-identical across repeated runs") {
  const auto sys = cross_coupled_system(2.0);
  EngineConfig cfg;
  cfg.N = 6;
  const auto a = report_to_json(run_multinorm_search(shifted(sys, 0.6), cfg));
  const auto b = report_to_json(run_multinorm_search(shifted(sys, 0.6), cfg));
  CHECK(a.dump() == b.dump());
}

TEST_CASE("snapshot-membership mode certifies the same bounds with more vertices") {
  const auto sys = two_diag_system();
  EngineConfig cfg;
  cfg.N = 6;
  auto snapshot = cfg;
  snapshot.parallel = true;
  const auto base = run_multinorm_search(sys, cfg);
  const auto snap = run_multinorm_search(sys, snapshot);
  REQUIRE(base.termination == TerminationCase::LyapunovCertificate);
  REQUIRE(snap.termination == TerminationCase::LyapunovCertificate);
  // Identical polytopes after pruning to extreme generators: identical nu.
  CHECK(snap.nu == doctest::Approx(base.nu).epsilon(1e-9));
}

TEST_CASE("searches reject systems with unbounded windows") {
  auto sys = two_diag_system();
  sys.upper[0] = kInfinity;
  EngineConfig cfg;
  CHECK_THROWS_AS((void)run_multinorm_search(sys, cfg), InfiniteBoundError);
  CHECK_THROWS_AS((void)bisect_sigma(sys, cfg, 0.05), InfiniteBoundError);
}

} // TEST_SUITE
