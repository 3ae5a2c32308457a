#include "lyapcert/enumerate.hpp"

#include "lyapcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lyapcert {

namespace {

/// Lexicographic minimality among cyclic rotations; rotations of an
/// alternating schedule with distinct first/last modes remain admissible, so
/// evaluating only the minimal representative loses nothing.
bool is_canonical_rotation(const std::vector<std::pair<int, int>>& seq) {
  const std::size_t L = seq.size();
  for (std::size_t r = 1; r < L; ++r) {
    for (std::size_t i = 0; i < L; ++i) {
      const auto& a = seq[(i + r) % L];
      const auto& b = seq[i];
      if (a < b) return false;
      if (b < a) break;
    }
  }
  return true;
}

double largest_singular_value(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

} // namespace

EnumerationResult best_periodic_lower_bound(const RestrictedSystem& sys, int max_legs,
                                            int grid_points, std::uint64_t budget) {
  sys.validate();
  if (!sys.all_upper_finite()) {
    throw InfiniteBoundError(
        "best_periodic_lower_bound: infinite window upper bound; apply the cut-tail "
        "simplification (reduce) first");
  }
  if (max_legs < 2) throw std::invalid_argument("best_periodic_lower_bound: max_legs < 2");
  if (grid_points < 1) throw std::invalid_argument("best_periodic_lower_bound: grid_points < 1");

  const int n = sys.num_modes();
  // Per-mode duration grids (window endpoints always included) and their
  // precomputed exponentials.
  std::vector<std::vector<double>> durations(static_cast<std::size_t>(n));
  std::vector<std::vector<Matrix>> exps(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (int i = 0; i < grid_points; ++i) {
      const double frac = grid_points == 1 ? 0.0 : static_cast<double>(i) / (grid_points - 1);
      const double dur = sys.lower[ju] + frac * (sys.upper[ju] - sys.lower[ju]);
      durations[ju].push_back(dur);
      exps[ju].push_back(expm(sys.modes[ju], dur));
    }
  }

  EnumerationResult out;
  std::vector<std::pair<int, int>> seq; // (mode, duration index) per leg
  bool stop = false;

  auto evaluate = [&] {
    if (!is_canonical_rotation(seq)) return;
    if (out.laws_evaluated >= budget) {
      out.exhaustive = false;
      stop = true;
      return;
    }
    ++out.laws_evaluated;
    Matrix P = exps[static_cast<std::size_t>(seq[0].first)][static_cast<std::size_t>(seq[0].second)];
    double logfac = 0.0;
    double total = durations[static_cast<std::size_t>(seq[0].first)][static_cast<std::size_t>(seq[0].second)];
    {
      const double f = P.norm();
      logfac += std::log(f);
      P /= f;
    }
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const auto ju = static_cast<std::size_t>(seq[k].first);
      const auto iu = static_cast<std::size_t>(seq[k].second);
      P = exps[ju][iu] * P; // later legs act on the left
      total += durations[ju][iu];
      const double f = P.norm();
      logfac += std::log(f);
      P /= f;
    }
    const double rate = (std::log(spectral_radius(P)) + logfac) / total;
    if (rate > out.bound) {
      out.bound = rate;
      out.best_law.legs.clear();
      for (const auto& [mode, idx] : seq) {
        out.best_law.legs.push_back(
            {mode, durations[static_cast<std::size_t>(mode)][static_cast<std::size_t>(idx)]});
      }
    }
  };

  // Depth-first over mode sequences and duration grids, modes ascending so
  // the enumeration order (and thus budget cutoffs) is deterministic.
  auto rec = [&](auto&& self, int pos, int length) -> void {
    if (stop) return;
    if (pos == length) {
      evaluate();
      return;
    }
    for (int mode = 0; mode < n && !stop; ++mode) {
      if (pos > 0 && mode == seq[static_cast<std::size_t>(pos - 1)].first) continue;
      if (pos == length - 1 && mode == seq[0].first) continue;
      for (int idx = 0; idx < grid_points && !stop; ++idx) {
        seq.emplace_back(mode, idx);
        self(self, pos + 1, length);
        seq.pop_back();
      }
    }
  };
  for (int length = 2; length <= max_legs && !stop; ++length) {
    rec(rec, 0, length);
  }
  return out;
}

RestrictedSystem discontinuous_period_fixture(double a, double upper) {
  if (!(a > 0.0)) {
    throw std::invalid_argument("discontinuous_period_fixture: a must be positive");
  }
  if (!(upper > M_PI)) {
    throw std::invalid_argument("discontinuous_period_fixture: upper bound must exceed pi");
  }
  RestrictedSystem sys;
  Matrix contraction(2, 2);
  contraction << -1.0, 0.0, 0.0, -a;
  Matrix rotation(2, 2);
  rotation << 0.0, -1.0, 1.0, 0.0;
  sys.modes = {contraction, rotation};
  sys.lower = {M_PI, M_PI};
  sys.upper = {upper, upper};
  return sys;
}

GrowthProbeResult growth_probe(const RestrictedSystem& sys, int num_laws, double horizon,
                               std::uint64_t seed) {
  sys.validate();
  if (num_laws < 1) throw std::invalid_argument("growth_probe: num_laws < 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("growth_probe: horizon must be positive");

  const int n = sys.num_modes();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> first_mode(0, n - 1);
  std::uniform_int_distribution<int> other_mode(0, n - 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GrowthProbeResult out;
  for (int sample = 0; sample < num_laws; ++sample) {
    int mode = first_mode(rng);
    double t = 0.0;
    Matrix P = Matrix::Identity(sys.dim(), sys.dim());
    double logfac = 0.0;
    int legs = 0;
    while (true) {
      const auto ju = static_cast<std::size_t>(mode);
      const double remaining = horizon - t;
      if (remaining < sys.lower[ju]) break;
      const double cap = std::min(sys.upper[ju], remaining);
      const double dur = sys.lower[ju] + unit(rng) * (cap - sys.lower[ju]);
      P = expm(sys.modes[ju], dur) * P;
      const double f = P.norm();
      logfac += std::log(f);
      P /= f;
      t += dur;
      ++legs;
      int next = other_mode(rng);
      if (next >= mode) ++next;
      mode = next;
    }
    double rate;
    if (legs == 0) {
      // Horizon shorter than the first window: fall back to the truncated
      // single-mode growth rate and flag the sample.
      out.short_horizon = true;
      rate = std::log(largest_singular_value(expm(sys.modes[static_cast<std::size_t>(mode)],
                                                  horizon))) /
             horizon;
    } else {
      if (legs == 1) out.short_horizon = true;
      rate = (std::log(largest_singular_value(P)) + logfac) / t;
    }
    out.rate = std::max(out.rate, rate);
  }
  return out;
}

} // namespace lyapcert
