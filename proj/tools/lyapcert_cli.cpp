// Command-line front end: certified growth-rate bounds for switched linear
// systems with per-mode dwell-time windows.
//
// Exit codes: 0 success, 1 internal failure, 2 malformed or unreadable
// input, 3 unsupported infinite dwell-time bound, 4 missing artifact.

#include "lyapcert/engine.hpp"
#include "lyapcert/enumerate.hpp"
#include "lyapcert/errors.hpp"
#include "lyapcert/serialize.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

namespace {

using namespace lyapcert;

struct MissingArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string law_text(const FiniteSwitchingLaw& law) {
  if (law.empty()) return "(none)";
  std::string s = "[";
  for (std::size_t i = 0; i < law.legs.size(); ++i) {
    if (i > 0) s += ", ";
    s += "(" + std::to_string(law.legs[i].mode + 1) + ", " + num(law.legs[i].duration) + ")";
  }
  return s + "]";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_text_file(out_path, text);
}

struct EngineFlags {
  int n_grid = 10;
  double delta = 1e-3;
  int kmax = 100;
  std::string hull = "sym";
  int start_space = 0; // 1-based; 0 = automatic
  bool parallel = false;

  void attach(CLI::App* sub) {
    sub->add_option("--n-grid", n_grid, "duration-grid refinements per window")
        ->check(CLI::PositiveNumber);
    sub->add_option("--delta", delta, "halt threshold for the growth-rate test")
        ->check(CLI::PositiveNumber);
    sub->add_option("--kmax", kmax, "iteration cap of the polytope search")
        ->check(CLI::PositiveNumber);
    sub->add_option("--hull", hull, "hull convention: sym or pos")
        ->check(CLI::IsMember({"sym", "pos"}));
    sub->add_option("--start-space", start_space, "initial space (1-based; 0 = automatic)");
    sub->add_flag("--parallel", parallel, "test candidates against iteration-start hulls");
  }

  [[nodiscard]] EngineConfig to_config() const {
    EngineConfig config;
    config.N = n_grid;
    config.delta = delta;
    config.K_max = kmax;
    config.hull = hull == "pos" ? HullStrategy::Positive : HullStrategy::Symmetrized;
    config.start_space = start_space - 1;
    config.parallel = parallel;
    return config;
  }
};

Vector parse_vector(const std::string& text) {
  Vector v;
  std::vector<double> entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t consumed = 0;
    entries.push_back(std::stod(text.substr(pos), &consumed));
    pos += consumed;
    if (pos < text.size()) {
      if (text[pos] != ',') throw std::invalid_argument("expected ',' in vector literal");
      ++pos;
    }
  }
  if (entries.empty()) throw std::invalid_argument("empty vector literal");
  v.resize(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = entries[i];
  return v;
}

int run(int argc, char** argv) {
  CLI::App app{"certified two-sided bounds on the top growth rate of switched "
               "linear systems with dwell-time windows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lyapcert 1.0.0");

  std::string system_path, out_path, law_path, report_path;
  double width = 0.25;
  int max_probes = 60;
  double prior_lower = -kInfinity;

  auto* compute = app.add_subcommand(
      "compute", "bisect to a certified interval around the top growth rate");
  compute->add_option("system", system_path, "system JSON file")->required();
  EngineFlags compute_flags;
  compute_flags.attach(compute);
  compute->add_option("--width", width, "target interval width")->check(CLI::PositiveNumber);
  compute->add_option("--max-probes", max_probes, "bisection probe cap")
      ->check(CLI::PositiveNumber);
  compute->add_option("--prior-lower", prior_lower,
                      "known growth-rate lower bound to pre-tighten the bracket");
  compute->add_option("-o,--out", out_path, "write the interval JSON here instead of stdout");

  auto* check = app.add_subcommand(
      "check-stability", "decide STABLE / UNSTABLE / UNDECIDED from the certified interval");
  check->add_option("system", system_path, "system JSON file")->required();
  EngineFlags check_flags;
  check_flags.attach(check);
  check->add_option("--width", width, "target interval width")->check(CLI::PositiveNumber);
  check->add_option("--max-probes", max_probes, "bisection probe cap")
      ->check(CLI::PositiveNumber);
  check->add_option("-o,--out", out_path, "also write the interval JSON here");

  auto* cuttail = app.add_subcommand(
      "cut-tail", "per-mode tail-absorption thresholds; optionally rewrite the windows");
  cuttail->add_option("system", system_path, "system JSON file")->required();
  std::string simplify_mode;
  double cut_tol = 1e-6;
  std::uint64_t seed = kCutTailSeed;
  cuttail->add_option("--simplify", simplify_mode, "rewrite windows: reduce or cancel")
      ->check(CLI::IsMember({"reduce", "cancel"}));
  cuttail->add_option("--tol", cut_tol, "threshold location tolerance")
      ->check(CLI::PositiveNumber);
  cuttail->add_option("--seed", seed, "sampling seed for the trajectory-hull program");
  cuttail->add_option("-o,--out", out_path, "write the result JSON here instead of stdout");

  auto* oracle = app.add_subcommand(
      "oracle", "exhaustive periodic-schedule lower bound on the top growth rate");
  oracle->add_option("system", system_path, "system JSON file")->required();
  int max_legs = 6, grid_points = 5;
  std::uint64_t budget = 2000000;
  oracle->add_option("--max-legs", max_legs, "maximal schedule length")
      ->check(CLI::Range(2, 64));
  oracle->add_option("--grid-points", grid_points, "duration samples per window")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--budget", budget, "schedule evaluation budget");
  oracle->add_option("-o,--out", out_path, "write the result JSON here instead of stdout");

  auto* simulate = app.add_subcommand("simulate", "sample a trajectory under a schedule");
  simulate->add_option("system", system_path, "system JSON file")->required();
  std::string x0_text = "";
  double step = 0.01;
  simulate->add_option("--law", law_path, "schedule JSON file")->required();
  simulate->add_option("--x0", x0_text, "start point as comma-separated numbers");
  simulate->add_option("--step", step, "output sampling step")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--out", out_path, "write the trajectory CSV here instead of stdout");

  auto* export_cmd = app.add_subcommand(
      "export", "write the per-space polytopes of a saved report to files");
  std::string format = "json", prefix = "polytope";
  export_cmd->add_option("--report", report_path, "report or interval JSON produced by compute")
      ->required();
  export_cmd->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  export_cmd->add_option("-o,--out", prefix, "output file prefix");

  CLI11_PARSE(app, argc, argv);

  if (compute->parsed() || check->parsed()) {
    const auto sys = load_system(system_path);
    const auto config = (compute->parsed() ? compute_flags : check_flags).to_config();
    const auto interval = bisect_sigma(sys, config, width, prior_lower, max_probes);
    const std::string doc = interval_to_json(interval).dump(2) + "\n";
    if (check->parsed()) {
      std::string verdict = "UNDECIDED";
      if (interval.hi < 0.0)
        verdict = "STABLE";
      else if (interval.lo > 0.0)
        verdict = "UNSTABLE";
      std::printf("%s: sigma in [%s, %s] (width %s, %s)\n", verdict.c_str(),
                  num(interval.lo).c_str(), num(interval.hi).c_str(),
                  num(interval.hi - interval.lo).c_str(),
                  interval.converged ? "converged" : "not converged");
      if (!out_path.empty()) write_text_file(out_path, doc);
      return 0;
    }
    if (out_path.empty()) {
      emit(doc, out_path);
    } else {
      write_text_file(out_path, doc);
      std::printf("sigma in [%s, %s] (width %s, %s)\n", num(interval.lo).c_str(),
                  num(interval.hi).c_str(), num(interval.hi - interval.lo).c_str(),
                  interval.converged ? "converged" : "not converged");
    }
    return 0;
  }

  if (cuttail->parsed()) {
    const auto sys = load_system(system_path);
    if (!simplify_mode.empty()) {
      const auto mode = simplify_mode == "reduce" ? SimplifyMode::Reduce : SimplifyMode::Cancel;
      const auto result = simplify_bounds(sys, mode, cut_tol, 3.0, 2000, seed);
      emit(simplify_to_json(result, mode).dump(2) + "\n", out_path);
      return 0;
    }
    json all = json::array();
    for (int j = 0; j < sys.num_modes(); ++j) {
      json entry;
      entry["mode"] = j + 1;
      try {
        const auto result = find_t_cut(sys.modes[static_cast<std::size_t>(j)], cut_tol, 3.0,
                                       2000, seed);
        entry["result"] = cuttail_result_to_json(result);
        std::printf("mode %d: t_cut = %s\n", j + 1, num(result.t_cut).c_str());
      } catch (const std::invalid_argument&) {
        entry["result"] = nullptr;
        std::printf("mode %d: not Hurwitz stable, no threshold\n", j + 1);
      }
      all.push_back(std::move(entry));
    }
    if (!out_path.empty()) write_text_file(out_path, all.dump(2) + "\n");
    return 0;
  }

  if (oracle->parsed()) {
    const auto sys = load_system(system_path);
    const auto result = best_periodic_lower_bound(sys, max_legs, grid_points, budget);
    if (std::isfinite(result.bound))
      std::printf("lower bound %s via %s (%s, %llu schedules)\n", num(result.bound).c_str(),
                  law_text(result.best_law).c_str(),
                  result.exhaustive ? "exhaustive" : "budget exhausted",
                  static_cast<unsigned long long>(result.laws_evaluated));
    else
      std::printf("no periodizable schedule found\n");
    if (!out_path.empty())
      write_text_file(out_path, enumeration_to_json(result).dump(2) + "\n");
    return 0;
  }

  if (simulate->parsed()) {
    const auto sys = load_system(system_path);
    const auto law = load_law(law_path);
    if (!is_admissible(law, sys))
      throw std::invalid_argument("schedule is not admissible for this system");
    Vector x0;
    if (x0_text.empty())
      x0 = Vector::Unit(sys.dim(), 0);
    else
      x0 = parse_vector(x0_text);
    if (x0.size() != sys.dim())
      throw std::invalid_argument("start point dimension does not match the system");
    const auto samples = lyapcert::simulate(law, sys, x0, step);
    std::string csv = "t";
    for (int i = 0; i < sys.dim(); ++i) csv += ",x" + std::to_string(i + 1);
    csv += "\n";
    char buf[64];
    for (const auto& sample : samples) {
      std::snprintf(buf, sizeof buf, "%.17g", sample.t);
      csv += buf;
      for (Eigen::Index i = 0; i < sample.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", sample.x(i));
        csv += buf;
      }
      csv += "\n";
    }
    emit(csv, out_path);
    return 0;
  }

  if (export_cmd->parsed()) {
    std::string text;
    try {
      text = read_text_file(report_path);
    } catch (const std::runtime_error&) {
      throw MissingArtifactError("report file not found: " + report_path);
    }
    json doc = json::parse(text);
    // `compute` wraps the certifying report under "certificate".
    if (doc.is_object() && doc.contains("certificate") && doc.at("certificate").is_object())
      doc = doc.at("certificate");
    if (!doc.is_object() || !doc.contains("polytopes") || !doc.at("polytopes").is_array() ||
        doc.at("polytopes").empty())
      throw MissingArtifactError("report carries no polytopes: " + report_path);
    const auto multi = polytopes_from_report_json(doc);
    for (std::size_t q = 0; q < multi.spaces.size(); ++q) {
      const std::string base = prefix + "_space" + std::to_string(q + 1);
      if (format == "csv") {
        write_text_file(base + ".csv", polytope_csv_2d(multi.spaces[q]));
        std::printf("wrote %s.csv (%zu vertices)\n", base.c_str(),
                    multi.spaces[q].vertices.size());
      } else {
        write_text_file(base + ".json",
                        polytope_to_json(static_cast<int>(q) + 1, multi.spaces[q]).dump(2) +
                            "\n");
        std::printf("wrote %s.json (%zu vertices)\n", base.c_str(),
                    multi.spaces[q].vertices.size());
      }
    }
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const MissingArtifactError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const InfiniteBoundError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0) {
      std::fprintf(stderr, "error: %s\n", what.c_str());
      return 2;
    }
    std::fprintf(stderr, "error: %s\n", what.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
