#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpcac/cones.hpp"
#include "mpcac/model.hpp"
#include "mpcac/report.hpp"

namespace mpcac {

struct FactOutcome {
  bool pass = false;
  std::string observed;
};

struct CorpusCase;

/// One expected fact, checked by exactly one assertion.
struct Fact {
  std::string id;
  std::string description;
  std::function<FactOutcome(const CorpusCase&)> check;
};

struct NamedPoint {
  std::string label;
  PairPoint point;
};

/// A worked example: either an MPCaC instance or a bare complementarity set.
struct CorpusCase {
  std::string id;
  std::string citation;
  std::optional<Problem> problem;
  std::optional<AffinePairSet> set;
  std::vector<NamedPoint> points;
  std::vector<Fact> facts;

  const PairPoint& point(const std::string& label) const;
};

/// The compiled-in corpus, in a fixed order.
const std::vector<CorpusCase>& corpus_cases();

struct FactResult {
  std::string id;
  std::string description;
  bool pass = false;
  std::string observed;
};

struct CaseResult {
  std::string id;
  std::string citation;
  std::vector<FactResult> facts;
  bool pass() const;
};

struct CorpusRun {
  std::vector<CaseResult> cases;
  int facts = 0;
  int failed = 0;
};

/// Runs every case whose id starts with `prefix` (all cases for "").
CorpusRun run_corpus(const std::string& prefix = "");

Json corpus_json(const CorpusRun& run);
std::string corpus_table(const CorpusRun& run);

/// Writes <id>.problem.json or <id>.set.json plus <id>.points.json per case.
/// Returns the written file names in order.
std::vector<std::string> export_corpus(const std::string& dir);

/// Pair-set documents: {"format": "mpcac-1", "kind": "pair-set", "name", "n",
/// "ineq", "ineq_rhs", "eq", "eq_rhs"} with rows over (x, y).
AffinePairSet pair_set_from_json(const Json& doc);
Json pair_set_to_json(const AffinePairSet& s, const std::string& name);

}  // namespace mpcac
