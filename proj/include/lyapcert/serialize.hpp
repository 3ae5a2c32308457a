#ifndef LYAPCERT_SERIALIZE_HPP
#define LYAPCERT_SERIALIZE_HPP

#include "lyapcert/cuttail.hpp"
#include "lyapcert/engine.hpp"
#include "lyapcert/enumerate.hpp"

#include <json.hpp>

#include <string>

namespace lyapcert {

/// All report JSON uses insertion-ordered objects so that identical inputs
/// produce byte-identical documents.
using json = nlohmann::ordered_json;

// --- systems ---------------------------------------------------------------
// Format: {"modes": [<row-major d*d array>, ...],
//          "lower": [...], "upper": [... numbers or "inf"]}
[[nodiscard]] json system_to_json(const RestrictedSystem& sys);
[[nodiscard]] RestrictedSystem system_from_json(const json& j);
[[nodiscard]] RestrictedSystem load_system(const std::string& path);
void save_system(const RestrictedSystem& sys, const std::string& path);

// --- switching schedules -----------------------------------------------------
// Format: [[mode (1-based), duration], ...]
[[nodiscard]] json law_to_json(const FiniteSwitchingLaw& law);
[[nodiscard]] FiniteSwitchingLaw law_from_json(const json& j);
[[nodiscard]] FiniteSwitchingLaw load_law(const std::string& path);

// --- engine configuration ----------------------------------------------------
// Format: {"N": int, "delta": real, "K_max": int,
//          "hull": "symmetrized"|"positive",
//          "start_space": int (1-based) | "auto", "parallel": bool};
// absent keys keep their defaults.
[[nodiscard]] json config_to_json(const EngineConfig& config);
[[nodiscard]] EngineConfig config_from_json(const json& j);

// --- results -----------------------------------------------------------------
[[nodiscard]] json report_to_json(const AlgorithmReport& report);
[[nodiscard]] json interval_to_json(const SigmaInterval& interval);
[[nodiscard]] json audit_to_json(const AuditResult& audit);
[[nodiscard]] json enumeration_to_json(const EnumerationResult& result);
[[nodiscard]] json simplify_to_json(const SimplifyResult& result, SimplifyMode mode);
[[nodiscard]] json cuttail_result_to_json(const CutTailResult& result);
[[nodiscard]] json polytope_to_json(int space_1based, const PolytopeHull& hull);

/// Recover the per-space polytopes (and their hull convention) from a report
/// document previously produced by `report_to_json`.
/// @throws std::invalid_argument when the document carries no polytopes.
[[nodiscard]] MultiPolytope polytopes_from_report_json(const json& j);

/// Two-dimensional vertex export: header "x,y", one representative vertex
/// per line, sorted by polar angle (ties by radius).
/// @throws std::invalid_argument when the hull is not two-dimensional.
[[nodiscard]] std::string polytope_csv_2d(const PolytopeHull& hull);

// --- small file helpers --------------------------------------------------------
[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace lyapcert

#endif // LYAPCERT_SERIALIZE_HPP
