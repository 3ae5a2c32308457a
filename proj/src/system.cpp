#include "lyapcert/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lyapcert {

bool RestrictedSystem::all_upper_finite() const {
  return std::all_of(upper.begin(), upper.end(),
                     [](double u) { return std::isfinite(u); });
}

void RestrictedSystem::validate() const {
  if (modes.size() < 2) {
    throw std::invalid_argument("system: at least two modes are required");
  }
  if (lower.size() != modes.size() || upper.size() != modes.size()) {
    throw std::invalid_argument("system: window arrays must match the mode count");
  }
  const int d = dim();
  for (const auto& A : modes) {
    if (A.rows() != d || A.cols() != d || d == 0) {
      throw std::invalid_argument("system: modes must be equal-size square matrices");
    }
    if (!A.allFinite()) {
      throw std::invalid_argument("system: mode entries must be finite");
    }
  }
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (!(lower[j] > 0.0) || !std::isfinite(lower[j])) {
      throw std::invalid_argument("system: lower window bounds must be positive and finite");
    }
    if (!(upper[j] > lower[j])) {
      throw std::invalid_argument("system: upper window bounds must exceed lower bounds");
    }
  }
}

RestrictedSystem shifted(const RestrictedSystem& sys, double alpha) {
  RestrictedSystem out = sys;
  if (alpha == 0.0) return out;
  const int d = sys.dim();
  const Matrix shift = alpha * Matrix::Identity(d, d);
  for (auto& A : out.modes) A -= shift;
  return out;
}

double FiniteSwitchingLaw::total_time() const {
  double t = 0.0;
  for (const auto& leg : legs) t += leg.duration;
  return t;
}

bool is_admissible(const FiniteSwitchingLaw& law, const RestrictedSystem& sys) {
  if (law.legs.empty()) return false;
  int previous = -1;
  for (const auto& leg : law.legs) {
    if (leg.mode < 0 || leg.mode >= sys.num_modes()) return false;
    if (leg.mode == previous) return false;
    const auto j = static_cast<std::size_t>(leg.mode);
    if (!(leg.duration >= sys.lower[j]) || !(leg.duration <= sys.upper[j])) return false;
    previous = leg.mode;
  }
  return true;
}

bool is_periodizable(const FiniteSwitchingLaw& law) {
  return law.legs.size() >= 2 && law.legs.front().mode != law.legs.back().mode;
}

ModeProduct product(const FiniteSwitchingLaw& law, const RestrictedSystem& sys) {
  const int d = sys.dim();
  ModeProduct out;
  out.matrix = Matrix::Identity(d, d);
  for (const auto& leg : law.legs) {
    if (leg.mode < 0 || leg.mode >= sys.num_modes()) {
      throw std::invalid_argument("product: mode index out of range");
    }
    // Later legs act on the left: x(T) = e^{d_K A_{j_K}} ... e^{d_1 A_{j_1}} x(0).
    out.matrix = expm(sys.modes[static_cast<std::size_t>(leg.mode)], leg.duration) * out.matrix;
    out.total_time += leg.duration;
  }
  return out;
}

double law_lower_bound(const FiniteSwitchingLaw& law, const RestrictedSystem& sys) {
  if (!is_admissible(law, sys)) {
    throw std::invalid_argument("law_lower_bound: law is not admissible for the system");
  }
  if (!is_periodizable(law)) {
    throw std::invalid_argument(
        "law_lower_bound: law is not periodizable (first and last modes coincide)");
  }
  const ModeProduct p = product(law, sys);
  return std::log(spectral_radius(p.matrix)) / p.total_time;
}

std::vector<TrajectorySample> simulate(const FiniteSwitchingLaw& law,
                                       const RestrictedSystem& sys,
                                       const Vector& x0, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("simulate: step must be positive");
  }
  if (x0.size() != sys.dim()) {
    throw std::invalid_argument("simulate: state dimension mismatch");
  }
  const double T = law.total_time();
  // Sample instants: uniform grid plus every switching instant.
  std::vector<double> times;
  for (double t = 0.0; t < T + 0.5 * step; t += step) times.push_back(std::min(t, T));
  double acc = 0.0;
  for (const auto& leg : law.legs) {
    acc += leg.duration;
    times.push_back(std::min(acc, T));
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());

  std::vector<TrajectorySample> samples;
  samples.reserve(times.size());
  std::size_t leg_index = 0;
  double leg_start = 0.0;
  Vector leg_state = x0; // state at the start of the current leg
  for (double t : times) {
    // Advance to the leg containing t.
    while (leg_index < law.legs.size() &&
           t > leg_start + law.legs[leg_index].duration + 1e-12) {
      const auto& leg = law.legs[leg_index];
      leg_state = expm(sys.modes[static_cast<std::size_t>(leg.mode)], leg.duration) * leg_state;
      leg_start += leg.duration;
      ++leg_index;
    }
    Vector x;
    if (leg_index >= law.legs.size()) {
      x = leg_state;
    } else {
      const auto& leg = law.legs[leg_index];
      x = expm(sys.modes[static_cast<std::size_t>(leg.mode)], t - leg_start) * leg_state;
    }
    samples.push_back({t, std::move(x)});
  }
  return samples;
}

} // namespace lyapcert
