// mpcac: checks and solves for cardinality-constrained problems.
//
// Exit codes: 0 success, 1 corpus assertions failed, 2 usage, input or I/O error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mpcac/cones.hpp"
#include "mpcac/corpus.hpp"
#include "mpcac/error.hpp"
#include "mpcac/lp.hpp"
#include "mpcac/report.hpp"
#include "mpcac/solver.hpp"
#include "mpcac/stationarity.hpp"

using namespace mpcac;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct Common {
  Tolerances tol;
  bool json = false;
};

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

Json load_document(const std::string& path) { return parse_json_text(read_text_file(path)); }

bool is_pair_set(const Json& doc) { return doc.is_object() && doc.value("kind", "") == "pair-set"; }

// --point accepts "x=..;y=..", "@file.json", or "@points.json#label" for a
// labelled array such as the one written by corpus --export-dir.
PairPoint load_point(const std::string& text, int n) {
  if (text.empty() || text[0] != '@') return parse_point_flag(text, n);
  const auto hash = text.find('#');
  const std::string path = text.substr(1, hash == std::string::npos ? std::string::npos : hash - 1);
  const std::string label = hash == std::string::npos ? "" : text.substr(hash + 1);
  const Json doc = load_document(path);
  if (!doc.is_array()) {
    if (!label.empty()) throw InvalidInput("'" + path + "' holds a single point; drop '#" + label + "'");
    return point_from_json(doc, n);
  }
  for (const Json& entry : doc) {
    if (!entry.is_object()) throw InvalidInput("'" + path + "': every entry must be a point object");
    if (label.empty() || entry.value("label", "") == label) {
      Json pt = entry;
      pt.erase("label");
      return point_from_json(pt, n);
    }
  }
  throw InvalidInput("'" + path + "' has no point labelled '" + label + "'");
}

int cmd_validate(const std::string& file, const Common& c) {
  const Json doc = load_document(file);
  std::vector<std::string> errs;
  if (is_pair_set(doc)) {
    try {
      pair_set_from_json(doc);
    } catch (const InvalidInput& e) {
      errs.push_back(e.what());
    }
  } else {
    errs = validate_problem_json(doc);
  }
  if (c.json) {
    Json j = report_header("validate");
    j["file"] = file;
    j["valid"] = errs.empty();
    j["errors"] = errs;
    print_json(j);
  } else if (errs.empty()) {
    std::cout << "ok\n";
  } else {
    for (const auto& e : errs) std::cout << "error: " << e << "\n";
  }
  return errs.empty() ? 0 : kExitError;
}

int cmd_reformulate(const std::string& file, const std::string& form, const std::string& point,
                    const std::string& indices, const Common& c) {
  const Problem p = problem_from_json(load_document(file));
  ReformulatedProblem rp = build_relaxed(p);
  if (form == "mixed") {
    rp = build_mixed_integer(p);
  } else if (form == "tightened") {
    if (point.empty()) throw InvalidInput("--form tightened needs --point");
    const PairPoint pt = load_point(point, p.n());
    const IndexList I = indices.empty() ? admissible_I_range(pt, c.tol.zero).min : parse_index_flag(indices);
    rp = build_tightened(p, pt, I, c.tol);
  }
  if (!c.json) {
    std::cout << format_reformulation(rp);
    return 0;
  }
  Json j = report_header("reformulation");
  j["form"] = form;
  j["problem"] = p.name();
  j["I"] = indices_json(rp.I);
  Json cons = Json::array();
  for (const Constraint& k : rp.constraints) {
    Json cj;
    cj["label"] = k.label();
    cj["sense"] = k.sense == Sense::Equal ? "=" : "<=";
    cj["expr"] = to_infix(k.expr, p.n());
    cons.push_back(cj);
  }
  j["constraints"] = cons;
  Json bin = Json::array();
  for (int v = 0; v < rp.num_vars(); ++v)
    if (rp.binary[static_cast<std::size_t>(v)]) bin.push_back(v < p.n() ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - p.n() + 1));
  j["binary"] = bin;
  j["text"] = format_reformulation(rp);
  print_json(j);
  return 0;
}

int cmd_check(const std::string& file, const std::string& point, const std::string& condition,
              const std::string& indices, const Common& c) {
  const Problem p = problem_from_json(load_document(file));
  const PairPoint pt = load_point(point, p.n());
  StationarityCertificate cert;
  if (condition == "kkt") {
    cert = check_kkt_relaxed(p, pt, c.tol);
  } else if (condition == "s") {
    cert = check_s_stationary(p, pt, c.tol);
  } else if (condition == "m") {
    cert = check_m_stationary(p, pt, c.tol);
  } else {
    cert = check_w_stationary(p, pt, parse_index_flag(indices), c.tol);
  }
  if (cert.holds()) cert = recover_full_multipliers(cert, p, pt);
  Json j = report_header("certificate");
  j["problem"] = p.name();
  j.update(certificate_json(cert));
  print_json(j);
  return 0;
}

int cmd_cq(const std::string& file, const std::string& point, const std::string& which,
           const Common& c) {
  const Json doc = load_document(file);
  Json j = report_header("cq");
  try {
    if (is_pair_set(doc)) {
      if (which == "licq" || which == "mfcq")
        throw OutOfScope("LICQ and MFCQ are checked on problem files, not bare sets");
      const AffinePairSet s = pair_set_from_json(doc);
      const PairPoint pt = load_point(point, s.n);
      j["set"] = doc.value("name", "");
      j.update(cq_json(which, which == "acq" ? check_acq(s, pt, c.tol) : check_gcq(s, pt, c.tol)));
      j["linearized"] = cone_json(linearized_cone(s, pt, c.tol));
      j["tangent"] = cone_union_json(tangent_cone_pieces(s, pt, 12, c.tol));
    } else {
      const Problem p = problem_from_json(doc);
      const PairPoint pt = load_point(point, p.n());
      j["problem"] = p.name();
      if (which == "licq") {
        j.update(cq_json(which, check_licq(p, pt, c.tol)));
      } else if (which == "mfcq") {
        j.update(cq_json(which, check_mfcq(p, pt, c.tol)));
      } else {
        const AffinePairSet s = relaxed_pair_set(p);
        j.update(cq_json(which, which == "acq" ? check_acq(s, pt, c.tol) : check_gcq(s, pt, c.tol)));
        j["linearized"] = cone_json(linearized_cone(s, pt, c.tol));
        j["tangent"] = cone_union_json(tangent_cone_pieces(s, pt, 12, c.tol));
      }
    }
  } catch (const OutOfScope& e) {
    j["which"] = which;
    j["verdict"] = "refused";
    j["detail"] = e.what();
    print_json(j);
    return kExitError;
  }
  j["tolerances"] = tolerances_json(c.tol);
  print_json(j);
  return 0;
}

int cmd_solve(const std::string& file, int starts, const std::string& table_path, bool diagnose,
              const Common& c) {
  const Problem p = problem_from_json(load_document(file));
  SolveOptions opts;
  opts.starts = starts;
  opts.tol = c.tol;
  const SolveReport rep = solve_brute(p, opts);
  if (!table_path.empty()) {
    if (table_path == "-")
      std::cout << solve_table_text(rep);
    else
      write_text_file(table_path, solve_table_text(rep));
  }
  Json j = report_header("solve");
  j["problem"] = p.name();
  j.update(solve_report_json(rep, opts));
  if (diagnose && rep.found) j["diagnostic"] = diagnostic_json(kkt_residual_mpcac_report(p, rep.x, c.tol));
  if (table_path != "-") print_json(j);
  return 0;
}

int cmd_corpus(const std::string& prefix, const std::string& export_dir, const Common& c) {
  if (!export_dir.empty()) {
    for (const auto& f : export_corpus(export_dir)) std::cerr << "wrote " << f << "\n";
  }
  const CorpusRun run = run_corpus(prefix);
  if (run.cases.empty()) throw InvalidInput("no corpus case id starts with '" + prefix + "'");
  if (c.json)
    print_json(corpus_json(run));
  else
    std::cout << corpus_table(run);
  return run.failed == 0 ? 0 : kExitFail;
}

// --I takes "1,3" or several tokens ("--I 1 3"), joined for parse_index_flag.
void add_index_option(CLI::App* app, std::string& target, const std::string& help) {
  app->add_option_function<std::vector<std::string>>(
         "--I",
         [&target](const std::vector<std::string>& parts) {
           target.clear();
           for (const auto& part : parts) target += part + " ";
         },
         help)
      ->expected(1, 64)
      ->allow_extra_args(false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks, certificates and solves for cardinality-constrained problems"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may also follow the subcommand

  Common common;
  bool verbose = false;
  app.add_option("--tol-zero", common.tol.zero, "zero tolerance for index classification")->capture_default_str();
  app.add_option("--tol-feas", common.tol.feas, "feasibility tolerance")->capture_default_str();
  app.add_option("--tol-lp", common.tol.lp, "simplex pivot tolerance")->capture_default_str();
  app.add_option("--tol-cert", common.tol.cert, "certificate residual tolerance")->capture_default_str();
  app.add_option("--tol-cone", common.tol.cone, "cone membership tolerance")->capture_default_str();
  app.add_option("--tol-tie", common.tol.tie, "objective tie tolerance")->capture_default_str();
  app.add_flag("--json", common.json, "machine-readable output");
  app.add_flag("-v,--verbose", verbose, "dump simplex tableaus to stderr");

  std::string file, point, indices, form = "relaxed", condition, which, case_prefix, export_dir, table;
  int starts = 8;
  bool diagnose = false;

  auto* validate = app.add_subcommand("validate", "parse a problem file and check its invariants");
  validate->add_option("file", file, "problem or pair-set file")->required();

  auto* reform = app.add_subcommand("reformulate", "print the relaxed, mixed-integer or tightened problem");
  reform->add_option("file", file)->required();
  reform->add_option("--form", form)->check(CLI::IsMember({"relaxed", "mixed", "tightened"}))->capture_default_str();
  reform->add_option("--point", point, "x=..;y=.. or @file");
  add_index_option(reform, indices, "1-based index set, e.g. 1,3 or 1 3");

  auto* check = app.add_subcommand("check", "stationarity certificate at a point");
  check->add_option("file", file)->required();
  check->add_option("--point", point, "x=..;y=.. or @file")->required();
  check->add_option("--condition", condition)->required()->check(CLI::IsMember({"kkt", "s", "m", "w"}));
  add_index_option(check, indices, "1-based index set for --condition w, e.g. 1,3 or 1 3");

  auto* cq = app.add_subcommand("cq", "constraint qualification verdict at a point");
  cq->add_option("file", file)->required();
  cq->add_option("--point", point, "x=..;y=.. or @file")->required();
  cq->add_option("--which", which)->required()->check(CLI::IsMember({"licq", "mfcq", "acq", "gcq"}));

  auto* solve = app.add_subcommand("solve", "global solve by support enumeration");
  solve->add_option("file", file)->required();
  solve->add_option("--starts", starts, "multi-start count per support")->capture_default_str()->check(CLI::PositiveNumber);
  solve->add_option("--emit-table", table, "write the per-support table to a file (- for stdout)");
  solve->add_flag("--diagnose", diagnose, "append the stationarity diagnostic of the winner");

  auto* corpus = app.add_subcommand("corpus", "run the built-in example corpus");
  corpus->add_option("--case", case_prefix, "only cases whose id starts with this prefix");
  corpus->add_option("--export-dir", export_dir, "write the corpus problems and points as files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }
  if (verbose) set_default_lp_trace(&std::cerr);

  try {
    if (*validate) return cmd_validate(file, common);
    if (*reform) return cmd_reformulate(file, form, point, indices, common);
    if (*check) {
      if (condition == "w" && check->count("--I") == 0) throw InvalidInput("--condition w needs --I");
      return cmd_check(file, point, condition, indices, common);
    }
    if (*cq) return cmd_cq(file, point, which, common);
    if (*solve) return cmd_solve(file, starts, table, diagnose, common);
    if (*corpus) return cmd_corpus(case_prefix, export_dir, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
