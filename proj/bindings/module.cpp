// Python bindings for the certified growth-rate toolkit.
//
// Structured data crosses the boundary as JSON text in exactly the formats
// the command-line tool reads and writes (see include/lyapcert/serialize.hpp),
// so documents are interchangeable between the two front ends.  The Python
// package in python/lyapcert wraps these calls with json.loads/dumps so users
// work with plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lyapcert/cuttail.hpp"
#include "lyapcert/engine.hpp"
#include "lyapcert/enumerate.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/serialize.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;

namespace {

using namespace lyapcert;

RestrictedSystem parse_system(const std::string& text) {
  return system_from_json(json::parse(text));
}

FiniteSwitchingLaw parse_law(const std::string& text) {
  return law_from_json(json::parse(text));
}

EngineConfig parse_config(const std::string& text) {
  return config_from_json(json::parse(text));
}

Matrix parse_matrix(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw std::invalid_argument("matrix must be non-empty");
  Matrix A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw std::invalid_argument("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j)
      A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return A;
}

std::string py_compute(const std::string& system_json, const std::string& config_json,
                       double width, double prior_lower, int max_probes) {
  const auto sys = parse_system(system_json);
  const auto cfg = parse_config(config_json);
  const auto interval = bisect_sigma(sys, cfg, width, prior_lower, max_probes);
  return interval_to_json(interval).dump(2);
}

std::string py_run_search(const std::string& system_json, const std::string& config_json) {
  const auto sys = parse_system(system_json);
  const auto cfg = parse_config(config_json);
  return report_to_json(run_multinorm_search(sys, cfg)).dump(2);
}

double py_law_lower_bound(const std::string& system_json, const std::string& law_json) {
  return law_lower_bound(parse_law(law_json), parse_system(system_json));
}

std::string py_find_t_cut(const std::vector<std::vector<double>>& matrix, double tol,
                          double horizon_mult, int grid, std::uint64_t seed) {
  const auto result = find_t_cut(parse_matrix(matrix), tol, horizon_mult, grid, seed);
  return cuttail_result_to_json(result).dump(2);
}

std::string py_simplify(const std::string& system_json, const std::string& mode,
                        double tol) {
  SimplifyMode parsed;
  if (mode == "reduce")
    parsed = SimplifyMode::Reduce;
  else if (mode == "cancel")
    parsed = SimplifyMode::Cancel;
  else
    throw std::invalid_argument("mode must be 'reduce' or 'cancel'");
  const auto result = simplify_bounds(parse_system(system_json), parsed, tol);
  return simplify_to_json(result, parsed).dump(2);
}

std::string py_enumerate(const std::string& system_json, int max_legs, int grid_points,
                         std::uint64_t budget) {
  const auto result =
      best_periodic_lower_bound(parse_system(system_json), max_legs, grid_points, budget);
  return enumeration_to_json(result).dump(2);
}

std::string py_audit(const std::string& system_json, const std::string& report_json,
                     int grid_points) {
  const auto sys = parse_system(system_json);
  const auto doc = json::parse(report_json);
  const auto polytopes = polytopes_from_report_json(doc);
  const double nu = doc.contains("nu") && doc["nu"].is_number()
                        ? doc["nu"].get<double>()
                        : 0.0;
  return audit_to_json(audit_multinorm(sys, polytopes, nu, grid_points)).dump(2);
}

std::vector<std::pair<double, std::vector<double>>>
py_simulate(const std::string& system_json, const std::string& law_json,
            const std::vector<double>& x0, double step) {
  const auto sys = parse_system(system_json);
  const auto law = parse_law(law_json);
  Vector start(static_cast<Eigen::Index>(x0.size()));
  for (Eigen::Index i = 0; i < start.size(); ++i)
    start(i) = x0[static_cast<std::size_t>(i)];
  std::vector<std::pair<double, std::vector<double>>> out;
  for (const auto& sample : simulate(law, sys, start, step)) {
    std::vector<double> coords(sample.x.data(), sample.x.data() + sample.x.size());
    out.emplace_back(sample.t, std::move(coords));
  }
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Certified growth-rate bounds for linear switching systems with "
            "per-mode dwell-time windows.  All structured arguments and "
            "results are JSON text in the command-line tool's formats.";

  py::register_exception<InfiniteBoundError>(m, "InfiniteBoundError");
  py::register_exception<SolverFailure>(m, "SolverFailure");

  m.def("compute", &py_compute, py::arg("system_json"), py::arg("config_json") = "{}",
        py::arg("width") = 1e-2, py::arg("prior_lower") = -kInfinity,
        py::arg("max_probes") = 60,
        "Bisect on the spectral shift until the certified two-sided interval "
        "for the top growth rate is narrower than `width`; returns the "
        "interval report as JSON text.");

  m.def("run_search", &py_run_search, py::arg("system_json"),
        py::arg("config_json") = "{}",
        "Run one invariant-polytope search on the system as given and return "
        "the full report (termination case, mu, nu, polytopes) as JSON text.");

  m.def("law_lower_bound", &py_law_lower_bound, py::arg("system_json"),
        py::arg("law_json"),
        "Certified lower bound on the top growth rate from a periodizable "
        "admissible schedule: log spectral radius of its fundamental matrix "
        "over its period.");

  m.def("find_t_cut", &py_find_t_cut, py::arg("matrix"), py::arg("tol") = 1e-6,
        py::arg("horizon_mult") = 3.0, py::arg("grid") = 2000,
        py::arg("seed") = kCutTailSeed,
        "Smallest certified horizon past which a trajectory of x' = Ax stays "
        "strictly inside the hull of its initial arc; `matrix` is a nested "
        "row list.  Returns the threshold and its certificate as JSON text.");

  m.def("simplify", &py_simplify, py::arg("system_json"), py::arg("mode") = "reduce",
        py::arg("tol") = 1e-6,
        "Rewrite switching windows wider than the per-mode thresholds: mode "
        "'reduce' shrinks each upper bound to lower + t_cut, mode 'cancel' "
        "replaces it by +infinity.  Returns the rewritten system and a "
        "per-mode action log as JSON text.");

  m.def("enumerate_periodic", &py_enumerate, py::arg("system_json"),
        py::arg("max_legs") = 4, py::arg("grid_points") = 3,
        py::arg("budget") = static_cast<std::uint64_t>(2000000),
        "Exhaustively enumerate periodizable schedules up to `max_legs` legs "
        "on per-mode duration grids and return the best certified lower "
        "bound with its schedule as JSON text.");

  m.def("audit", &py_audit, py::arg("system_json"), py::arg("report_json"),
        py::arg("grid_points") = 41,
        "Independently audit the polytopes of a search report against a "
        "system: every vertex propagated through any admissible leg of the "
        "nu-shifted system must land strictly inside the target polytope.");

  m.def("simulate", &py_simulate, py::arg("system_json"), py::arg("law_json"),
        py::arg("x0"), py::arg("step") = 0.01,
        "Sample the trajectory of a schedule from x0 on a uniform grid "
        "augmented with the switching instants; returns a list of "
        "(time, state) pairs.");
}
