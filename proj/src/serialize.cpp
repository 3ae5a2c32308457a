#include "lyapcert/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lyapcert {
namespace {

json bound_to_json(double v) {
  if (std::isfinite(v)) return v;
  return "inf";
}

double bound_from_json(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "Infinity" || s == "+inf") return kInfinity;
  }
  throw std::invalid_argument(std::string(what) + ": expected a number or \"inf\"");
}

json matrix_to_flat(const Matrix& A) {
  json out = json::array();
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) out.push_back(A(r, c));
  return out;
}

Matrix matrix_from_flat(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string(what) + ": expected a non-empty flat array");
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n)
    throw std::invalid_argument(std::string(what) + ": length " + std::to_string(n) +
                                " is not a perfect square");
  Matrix A(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) A(r, c) = j.at(k++).get<double>();
  return A;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const char* termination_name(TerminationCase c) {
  switch (c) {
    case TerminationCase::UnstableCandidate: return "unstable_candidate";
    case TerminationCase::LyapunovCertificate: return "lyapunov_certificate";
    case TerminationCase::Interrupted: return "interrupted";
  }
  return "interrupted";
}

const char* hull_name(HullStrategy s) {
  return s == HullStrategy::Positive ? "positive" : "symmetrized";
}

HullStrategy hull_from_name(const std::string& s) {
  if (s == "symmetrized" || s == "sym") return HullStrategy::Symmetrized;
  if (s == "positive" || s == "pos") return HullStrategy::Positive;
  throw std::invalid_argument("unknown hull convention \"" + s +
                              "\" (expected \"symmetrized\" or \"positive\")");
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

} // namespace

// --- systems -----------------------------------------------------------------

json system_to_json(const RestrictedSystem& sys) {
  json j;
  j["modes"] = json::array();
  for (const auto& A : sys.modes) j["modes"].push_back(matrix_to_flat(A));
  j["lower"] = sys.lower;
  j["upper"] = json::array();
  for (double M : sys.upper) j["upper"].push_back(bound_to_json(M));
  return j;
}

RestrictedSystem system_from_json(const json& j) {
  if (!j.is_object() || !j.contains("modes") || !j.contains("lower") || !j.contains("upper"))
    throw std::invalid_argument("system document needs \"modes\", \"lower\", and \"upper\"");
  RestrictedSystem sys;
  for (const auto& m : j.at("modes")) sys.modes.push_back(matrix_from_flat(m, "mode"));
  for (const auto& v : j.at("lower")) sys.lower.push_back(v.get<double>());
  for (const auto& v : j.at("upper")) sys.upper.push_back(bound_from_json(v, "upper bound"));
  sys.validate();
  return sys;
}

RestrictedSystem load_system(const std::string& path) {
  return system_from_json(load_json_file(path));
}

void save_system(const RestrictedSystem& sys, const std::string& path) {
  write_text_file(path, system_to_json(sys).dump(2) + "\n");
}

// --- switching schedules -------------------------------------------------------

json law_to_json(const FiniteSwitchingLaw& law) {
  json j = json::array();
  for (const auto& leg : law.legs) j.push_back(json::array({leg.mode + 1, leg.duration}));
  return j;
}

FiniteSwitchingLaw law_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("schedule document must be an array");
  FiniteSwitchingLaw law;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2)
      throw std::invalid_argument("schedule entries must be [mode, duration] pairs");
    const int mode = entry.at(0).get<int>();
    if (mode < 1) throw std::invalid_argument("schedule modes are 1-based");
    law.legs.push_back({mode - 1, entry.at(1).get<double>()});
  }
  return law;
}

FiniteSwitchingLaw load_law(const std::string& path) {
  return law_from_json(load_json_file(path));
}

// --- engine configuration --------------------------------------------------------

json config_to_json(const EngineConfig& config) {
  json j;
  j["N"] = config.N;
  j["delta"] = config.delta;
  j["K_max"] = config.K_max;
  j["hull"] = hull_name(config.hull);
  if (config.start_space < 0)
    j["start_space"] = "auto";
  else
    j["start_space"] = config.start_space + 1;
  j["parallel"] = config.parallel;
  return j;
}

EngineConfig config_from_json(const json& j) {
  EngineConfig config;
  if (!j.is_object()) throw std::invalid_argument("configuration document must be an object");
  if (j.contains("N")) config.N = j.at("N").get<int>();
  if (j.contains("delta")) config.delta = j.at("delta").get<double>();
  if (j.contains("K_max")) config.K_max = j.at("K_max").get<int>();
  if (j.contains("hull")) config.hull = hull_from_name(j.at("hull").get<std::string>());
  if (j.contains("start_space")) {
    const auto& s = j.at("start_space");
    if (s.is_string() && s.get<std::string>() == "auto")
      config.start_space = -1;
    else
      config.start_space = s.get<int>() - 1;
  }
  if (j.contains("parallel")) config.parallel = j.at("parallel").get<bool>();
  return config;
}

// --- results -----------------------------------------------------------------

json report_to_json(const AlgorithmReport& report) {
  json j;
  j["termination"] = termination_name(report.termination);
  j["mu"] = finite_or_null(report.mu);
  j["mu_law"] = law_to_json(report.mu_law);
  j["nu"] = report.nu_valid ? json(report.nu) : json(nullptr);
  j["nu_valid"] = report.nu_valid;
  j["gamma"] = report.termination == TerminationCase::Interrupted ? json(report.gamma)
                                                                  : json(nullptr);
  j["iterations"] = report.iterations;
  j["alpha_shift"] = report.alpha_shift;
  j["vertex_counts"] = report.vertex_counts;
  j["mode_norm_bounds"] = report.mode_norm_bounds;
  j["hull"] = hull_name(report.config_used.hull);
  j["polytopes"] = json::array();
  for (std::size_t q = 0; q < report.polytopes.spaces.size(); ++q)
    j["polytopes"].push_back(
        polytope_to_json(static_cast<int>(q) + 1, report.polytopes.spaces[q]));
  j["config"] = config_to_json(report.config_used);
  if (!report.warning.empty()) j["warning"] = report.warning;
  return j;
}

json interval_to_json(const SigmaInterval& interval) {
  json j;
  j["lo"] = finite_or_null(interval.lo);
  j["hi"] = finite_or_null(interval.hi);
  j["width"] = finite_or_null(interval.hi - interval.lo);
  j["converged"] = interval.converged;
  j["probes"] = interval.probes;
  j["history"] = json::array();
  for (const auto& p : interval.history) {
    json h;
    h["alpha"] = p.alpha;
    h["termination"] = termination_name(p.termination);
    h["mu"] = finite_or_null(p.mu);
    h["nu"] = p.nu_valid ? json(p.nu) : json(nullptr);
    h["nu_valid"] = p.nu_valid;
    h["iterations"] = p.iterations;
    j["history"].push_back(std::move(h));
  }
  j["certificate"] =
      interval.has_certificate ? report_to_json(interval.final_certificate) : json(nullptr);
  return j;
}

json audit_to_json(const AuditResult& audit) {
  json j;
  j["pass"] = audit.pass;
  j["worst_margin"] = audit.worst_margin;
  if (audit.pass) {
    j["from_space"] = nullptr;
    j["to_space"] = nullptr;
    j["t"] = nullptr;
    j["point"] = nullptr;
  } else {
    j["from_space"] = audit.from_space + 1;
    j["to_space"] = audit.to_space + 1;
    j["t"] = audit.t;
    j["point"] = vector_to_json(audit.point);
  }
  return j;
}

json enumeration_to_json(const EnumerationResult& result) {
  json j;
  j["bound"] = finite_or_null(result.bound);
  j["law"] = law_to_json(result.best_law);
  j["exhaustive"] = result.exhaustive;
  j["laws_evaluated"] = result.laws_evaluated;
  return j;
}

json simplify_to_json(const SimplifyResult& result, SimplifyMode mode) {
  json j;
  j["mode"] = mode == SimplifyMode::Reduce ? "reduce" : "cancel";
  j["system"] = system_to_json(result.system);
  j["log"] = json::array();
  for (const auto& entry : result.log) {
    json e;
    e["mode"] = entry.mode + 1;
    e["action"] = entry.action;
    e["t_cut"] = std::isnan(entry.t_cut) ? json(nullptr) : json(entry.t_cut);
    e["old_upper"] = bound_to_json(entry.old_upper);
    e["new_upper"] = bound_to_json(entry.new_upper);
    j["log"].push_back(std::move(e));
  }
  return j;
}

json cuttail_result_to_json(const CutTailResult& result) {
  json j;
  j["t_cut"] = result.t_cut;
  switch (result.method) {
    case CutTailMethod::ClosedFormReal2d: j["method"] = "closed_form_real_2d"; break;
    case CutTailMethod::ClosedFormComplex2d: j["method"] = "closed_form_complex_2d"; break;
    case CutTailMethod::ConvexProgram: j["method"] = "convex_program"; break;
  }
  j["certificate"] = json::array();
  for (const auto& [T, value] : result.certificate)
    j["certificate"].push_back(json::array({T, value}));
  return j;
}

json polytope_to_json(int space_1based, const PolytopeHull& hull) {
  json j;
  j["space"] = space_1based;
  j["hull"] = hull_name(hull.strategy);
  j["vertices"] = json::array();
  for (const auto& v : hull.vertices) j["vertices"].push_back(vector_to_json(v));
  return j;
}

MultiPolytope polytopes_from_report_json(const json& j) {
  if (!j.is_object() || !j.contains("polytopes") || !j.at("polytopes").is_array() ||
      j.at("polytopes").empty())
    throw std::invalid_argument("report document carries no polytopes");
  MultiPolytope multi;
  multi.spaces.resize(j.at("polytopes").size());
  for (const auto& pj : j.at("polytopes")) {
    const int space = pj.at("space").get<int>() - 1;
    if (space < 0 || space >= static_cast<int>(multi.spaces.size()))
      throw std::invalid_argument("polytope space index out of range");
    PolytopeHull hull;
    hull.strategy = hull_from_name(pj.at("hull").get<std::string>());
    for (const auto& vj : pj.at("vertices")) {
      Vector v(vj.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = vj.at(i).get<double>();
      hull.vertices.push_back(std::move(v));
    }
    multi.spaces[static_cast<std::size_t>(space)] = std::move(hull);
  }
  return multi;
}

std::string polytope_csv_2d(const PolytopeHull& hull) {
  if (hull.dim() != 2)
    throw std::invalid_argument("CSV export is only defined for two-dimensional polytopes");
  auto sorted = hull.vertices;
  std::sort(sorted.begin(), sorted.end(), [](const Vector& a, const Vector& b) {
    const double ang_a = std::atan2(a(1), a(0));
    const double ang_b = std::atan2(b(1), b(0));
    if (ang_a != ang_b) return ang_a < ang_b;
    return a.norm() < b.norm();
  });
  std::string out = "x,y\n";
  char buf[80];
  for (const auto& v : sorted) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v(0), v(1));
    out += buf;
  }
  return out;
}

// --- small file helpers ----------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

} // namespace lyapcert
