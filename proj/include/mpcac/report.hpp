#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mpcac/cones.hpp"
#include "mpcac/model.hpp"
#include "mpcac/solver.hpp"
#include "mpcac/stationarity.hpp"
#include "mpcac/tolerances.hpp"

namespace mpcac {

/// Insertion-ordered so that serialized reports keep a stable field order.
using Json = nlohmann::ordered_json;

inline constexpr const char* kDataFormat = "mpcac-1";
inline constexpr const char* kReportFormat = "mpcac-report-1";

// ---------------------------------------------------------------------------
// Problem and point files.

/// Every schema problem in a problem document; empty when it is valid.
/// Expression syntax errors carry their byte offset.
std::vector<std::string> validate_problem_json(const Json& doc);

/// Throws InvalidInput listing the first schema problem.
Problem problem_from_json(const Json& doc);
Json problem_to_json(const Problem& p);

/// {"format": "mpcac-1", "x": [...], "y": [...]?}
PairPoint point_from_json(const Json& doc, int n);
Json point_to_json(const PairPoint& pt);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Parses JSON text, turning syntax errors into InvalidInput.
Json parse_json_text(const std::string& text);

/// "x=0,0;y=1,0" (y optional). Throws InvalidInput.
PairPoint parse_point_flag(const std::string& text, int n);

/// "1,3" (one-based) to a sorted zero-based list. An empty string is the empty set.
IndexList parse_index_flag(const std::string& text);

// ---------------------------------------------------------------------------
// Report fragments. Index lists are one-based in every report.

Json vector_json(const Eigen::Ref<const Vec>& v);
Json indices_json(const IndexList& I);
Json tolerances_json(const Tolerances& tol);
Json index_sets_json(const IndexSets& s);

/// {"format": "mpcac-report-1", "kind": kind}
Json report_header(const std::string& kind);

Json certificate_json(const StationarityCertificate& cert);
Json profile_json(const StationarityProfile& prof);
Json cq_json(const std::string& which, const CqVerdict& v);
Json cone_json(const PolyhedralCone& c);
Json cone_union_json(const ConeUnion& u);
Json solve_report_json(const SolveReport& rep, const SolveOptions& opts);
Json diagnostic_json(const MpcacDiagnostic& d);

/// Plain-text table mirroring the per-support rows of a solve report.
std::string solve_table_text(const SolveReport& rep);

}  // namespace mpcac
