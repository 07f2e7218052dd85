#include "mpcac/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "mpcac/error.hpp"

namespace mpcac {

namespace {

const std::set<std::string> kProblemFields = {"format", "name", "n", "alpha", "objective", "g", "h"};

bool is_int(const Json& j) { return j.is_number_integer() || j.is_number_unsigned(); }

double clean(double v) { return v == 0.0 ? 0.0 : v; }  // folds -0 into 0

Json rows_json(const Mat& M) {
  Json out = Json::array();
  for (Index r = 0; r < M.rows(); ++r) out.push_back(vector_json(M.row(r).transpose()));
  return out;
}

Json cols_json(const Mat& M) {
  Json out = Json::array();
  for (Index c = 0; c < M.cols(); ++c) out.push_back(vector_json(M.col(c)));
  return out;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string tok = text.substr(pos, end - pos);
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    double v = 0.0;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (!tok.empty() && *b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != e)
      throw InvalidInput("malformed number '" + tok + "' in " + what);
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

std::vector<Expr> parse_expr_list(const Json& arr, const std::string& key, int n) {
  std::vector<Expr> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    try {
      out.push_back(parse_expr(arr[k].get<std::string>(), n));
    } catch (const ParseError& e) {
      throw InvalidInput(key + "[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> validate_problem_json(const Json& doc) {
  std::vector<std::string> errs;
  if (!doc.is_object()) return {"problem document must be a JSON object"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!kProblemFields.count(it.key())) errs.push_back("unknown field '" + it.key() + "'");

  if (!doc.contains("format"))
    errs.push_back("missing field 'format'");
  else if (!doc["format"].is_string() || doc["format"].get<std::string>() != kDataFormat)
    errs.push_back(std::string("field 'format' must be \"") + kDataFormat + "\"");
  if (!doc.contains("name") || !doc["name"].is_string())
    errs.push_back("field 'name' must be a string");

  int n = 0;
  bool n_ok = false;
  if (!doc.contains("n") || !is_int(doc["n"])) {
    errs.push_back("field 'n' must be an integer");
  } else {
    n = doc["n"].get<int>();
    n_ok = n >= 1;
    if (!n_ok) errs.push_back("field 'n' must be at least 1");
  }
  if (!doc.contains("alpha") || !is_int(doc["alpha"])) {
    errs.push_back("field 'alpha' must be an integer");
  } else if (n_ok) {
    const int alpha = doc["alpha"].get<int>();
    if (alpha <= 0 || alpha >= n)
      errs.push_back("alpha = " + std::to_string(alpha) + " violates 0 < alpha < n with n = " +
                     std::to_string(n) + "; the cardinality bound is assumed to satisfy alpha < n");
  }

  auto check_expr = [&](const Json& j, const std::string& where) {
    if (!j.is_string()) {
      errs.push_back(where + " must be an expression string");
      return;
    }
    if (!n_ok) return;
    try {
      parse_expr(j.get<std::string>(), n);
    } catch (const ParseError& e) {
      errs.push_back(where + ": syntax error: " + e.what());
    }
  };
  if (!doc.contains("objective"))
    errs.push_back("missing field 'objective'");
  else
    check_expr(doc["objective"], "objective");
  for (const char* key : {"g", "h"}) {
    if (!doc.contains(key)) continue;
    if (!doc[key].is_array()) {
      errs.push_back(std::string("field '") + key + "' must be an array of expression strings");
      continue;
    }
    for (std::size_t k = 0; k < doc[key].size(); ++k)
      check_expr(doc[key][k], std::string(key) + "[" + std::to_string(k) + "]");
  }
  return errs;
}

Problem problem_from_json(const Json& doc) {
  const auto errs = validate_problem_json(doc);
  if (!errs.empty()) throw InvalidInput(errs.front());
  const int n = doc["n"].get<int>();
  Expr f;
  try {
    f = parse_expr(doc["objective"].get<std::string>(), n);
  } catch (const ParseError& e) {
    throw InvalidInput(std::string("objective: ") + e.what());
  }
  return Problem(doc["name"].get<std::string>(), n, doc["alpha"].get<int>(), f,
                 doc.contains("g") ? parse_expr_list(doc["g"], "g", n) : std::vector<Expr>{},
                 doc.contains("h") ? parse_expr_list(doc["h"], "h", n) : std::vector<Expr>{});
}

Json problem_to_json(const Problem& p) {
  Json j;
  j["format"] = kDataFormat;
  j["name"] = p.name();
  j["n"] = p.n();
  j["alpha"] = p.alpha();
  j["objective"] = to_string(p.f());
  j["g"] = Json::array();
  for (const Expr& g : p.g()) j["g"].push_back(to_string(g));
  j["h"] = Json::array();
  for (const Expr& h : p.h()) j["h"].push_back(to_string(h));
  return j;
}

PairPoint point_from_json(const Json& doc, int n) {
  if (!doc.is_object()) throw InvalidInput("point document must be a JSON object");
  if (doc.contains("format") && doc["format"] != kDataFormat)
    throw InvalidInput(std::string("point field 'format' must be \"") + kDataFormat + "\"");
  auto read = [&](const char* key) {
    const Json& a = doc[key];
    if (!a.is_array() || static_cast<int>(a.size()) != n)
      throw InvalidInput(std::string("point field '") + key + "' must be an array of " +
                         std::to_string(n) + " numbers");
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      if (!a[i].is_number()) throw InvalidInput(std::string("point field '") + key + "' must hold numbers");
      v[i] = a[i].get<double>();
    }
    return v;
  };
  if (!doc.contains("x")) throw InvalidInput("point is missing 'x'");
  PairPoint pt{read("x"), std::nullopt};
  if (doc.contains("y")) pt.y = read("y");
  return pt;
}

Json point_to_json(const PairPoint& pt) {
  Json j;
  j["format"] = kDataFormat;
  j["x"] = vector_json(pt.x);
  if (pt.y) j["y"] = vector_json(*pt.y);
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

PairPoint parse_point_flag(const std::string& text, int n) {
  PairPoint pt;
  bool have_x = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    const std::string part = text.substr(pos, end - pos);
    pos = end + 1;
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos) throw InvalidInput("point part '" + part + "' lacks '='");
    std::string key = part.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::vector<double> vals = parse_numbers(part.substr(eq + 1), "--point");
    if (static_cast<int>(vals.size()) != n)
      throw InvalidInput("point component '" + key + "' needs " + std::to_string(n) + " values");
    const Vec v = Eigen::Map<const Vec>(vals.data(), n);
    if (key == "x") {
      pt.x = v;
      have_x = true;
    } else if (key == "y") {
      pt.y = v;
    } else {
      throw InvalidInput("unknown point component '" + key + "'");
    }
  }
  if (!have_x) throw InvalidInput("point needs an x component");
  return pt;
}

IndexList parse_index_flag(const std::string& text) {
  IndexList out;
  std::string norm = text;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream is(norm);
  std::string tok;
  while (is >> tok) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 1)
      throw InvalidInput("malformed index '" + tok + "' (indices are 1-based)");
    out.push_back(v - 1);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw InvalidInput("index set has duplicates");
  return out;
}

// ---------------------------------------------------------------------------

Json vector_json(const Eigen::Ref<const Vec>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(clean(v[i]));
  return out;
}

Json indices_json(const IndexList& I) {
  Json out = Json::array();
  for (int i : I) out.push_back(i + 1);
  return out;
}

Json tolerances_json(const Tolerances& tol) {
  Json j;
  j["zero"] = tol.zero;
  j["feas"] = tol.feas;
  j["lp"] = tol.lp;
  j["cert"] = tol.cert;
  j["cone"] = tol.cone;
  j["rank_rel"] = tol.rank_rel;
  j["tie"] = tol.tie;
  return j;
}

Json index_sets_json(const IndexSets& s) {
  Json j;
  j["I00"] = indices_json(s.i00);
  j["I+-0"] = indices_json(s.i_pm0);
  j["I0+-"] = indices_json(s.i0pm);
  j["I0+"] = indices_json(s.i0plus);
  j["I0>"] = indices_json(s.i0gt);
  j["I01"] = indices_json(s.i01);
  j["I0"] = indices_json(s.i0);
  return j;
}

Json report_header(const std::string& kind) {
  Json j;
  j["format"] = kReportFormat;
  j["kind"] = kind;
  return j;
}

Json certificate_json(const StationarityCertificate& cert) {
  Json j;
  j["condition"] = to_string(cert.condition);
  j["verdict"] = to_string(cert.verdict);
  j["I"] = indices_json(cert.I);
  Json mult;
  mult["lambda_g"] = vector_json(cert.lambda_g);
  mult["lambda_h"] = vector_json(cert.lambda_h);
  mult["gamma"] = vector_json(cert.gamma);
  j["multipliers"] = mult;
  if (cert.kkt) {
    Json k;
    k["lambda_g"] = vector_json(cert.kkt->g);
    k["lambda_h"] = vector_json(cert.kkt->h);
    k["lambda_theta"] = clean(cert.kkt->theta);
    k["lambda_H"] = vector_json(cert.kkt->mu);
    k["lambda_Htilde"] = vector_json(cert.kkt->Htilde);
    k["lambda_xi"] = vector_json(cert.kkt->xi);
    j["relaxed_kkt"] = k;
  } else {
    j["relaxed_kkt"] = nullptr;
  }
  if (cert.full) {
    Json f;
    f["lambda_theta"] = clean(cert.full->theta);
    f["lambda_H"] = vector_json(cert.full->H);
    f["lambda_Htilde"] = vector_json(cert.full->Htilde);
    f["lambda_G"] = vector_json(cert.full->G);
    Json items = Json::array();
    for (double v : cert.full->items) items.push_back(clean(v));
    f["item_residuals"] = items;
    j["full"] = f;
  } else {
    j["full"] = nullptr;
  }
  Json res;
  res["stationarity"] = clean(cert.stationarity_residual);
  res["complementarity"] = clean(cert.complementarity_residual);
  j["residuals"] = res;
  j["farkas"] = vector_json(cert.farkas);
  j["tolerances"] = tolerances_json(cert.tol);
  return j;
}

Json profile_json(const StationarityProfile& prof) {
  Json j;
  j["I_min"] = indices_json(prof.i_min);
  j["I00"] = indices_json(prof.free);
  Json entries = Json::array();
  for (const ProfileEntry& e : prof.entries) {
    Json row;
    row["I"] = indices_json(e.I);
    row["verdict"] = to_string(e.verdict);
    entries.push_back(row);
  }
  j["entries"] = entries;
  Json minimal = Json::array();
  for (const IndexList& I : prof.minimal) minimal.push_back(indices_json(I));
  j["minimal"] = minimal;
  return j;
}

Json cq_json(const std::string& which, const CqVerdict& v) {
  Json j;
  j["which"] = which;
  j["verdict"] = v.holds ? "holds" : "fails";
  j["flag"] = v.exact ? "exact" : "sampled";
  j["detail"] = v.detail;
  return j;
}

Json cone_json(const PolyhedralCone& c) {
  Json j;
  j["dim"] = c.dim();
  j["equalities"] = rows_json(c.equalities());
  j["inequalities"] = rows_json(c.inequalities());
  const Generators& g = c.generators();
  Json gens;
  gens["rays"] = cols_json(g.rays);
  gens["lineality"] = cols_json(g.lineality);
  j["generators"] = gens;
  return j;
}

Json cone_union_json(const ConeUnion& u) {
  Json j;
  j["dim"] = u.dim;
  Json pieces = Json::array();
  for (std::size_t k = 0; k < u.pieces.size(); ++k) {
    Json piece;
    piece["label"] = k < u.labels.size() ? u.labels[k] : "";
    piece["cone"] = cone_json(u.pieces[k]);
    pieces.push_back(piece);
  }
  j["pieces"] = pieces;
  return j;
}

Json solve_report_json(const SolveReport& rep, const SolveOptions& opts) {
  Json j;
  j["found"] = rep.found;
  j["label"] = rep.certified_global ? "global (exact convex path on every support)" : "best found";
  j["x"] = vector_json(rep.x);
  j["objective"] = rep.found ? Json(clean(rep.objective)) : Json(nullptr);
  j["support"] = indices_json(rep.support);
  j["companion_y"] = vector_json(rep.companion_y);
  j["winner_converged"] = rep.found && !rep.best_found_only;
  Json ties = Json::array();
  for (const IndexList& t : rep.ties) ties.push_back(indices_json(t));
  j["ties"] = ties;
  Json table = Json::array();
  for (const SupportResult& s : rep.table) {
    Json row;
    row["support"] = indices_json(s.support);
    row["x"] = vector_json(s.x);
    row["objective"] = clean(s.objective);
    row["kkt_residual"] = clean(s.kkt_residual);
    row["violation"] = clean(s.violation);
    row["status"] = to_string(s.status);
    row["method"] = s.method;
    row["starts"] = s.starts_used;
    table.push_back(row);
  }
  j["table"] = table;
  Json o;
  o["starts"] = opts.starts;
  o["kkt_tol"] = opts.kkt_tol;
  o["max_outer"] = opts.max_outer;
  o["max_inner"] = opts.max_inner;
  o["armijo"] = opts.armijo;
  j["options"] = o;
  j["tolerances"] = tolerances_json(opts.tol);
  return j;
}

Json diagnostic_json(const MpcacDiagnostic& d) {
  Json j;
  j["x"] = vector_json(d.x);
  j["objective"] = clean(d.objective);
  j["cardinality"] = d.cardinality;
  j["companion_y"] = vector_json(d.companion_y);
  j["companion_unique"] = d.companion_unique;
  Json pairs = Json::array();
  for (const PairDiagnostic& pd : d.pairs) {
    Json pj;
    pj["y"] = vector_json(pd.y);
    pj["canonical"] = pd.canonical;
    pj["index_sets"] = index_sets_json(pd.sets);
    pj["profile"] = profile_json(pd.profile);
    pj["kkt"] = certificate_json(pd.kkt);
    pj["s"] = certificate_json(pd.s);
    pj["m"] = certificate_json(pd.m);
    Json cq;
    cq["licq"] = cq_json("licq", pd.licq);
    cq["mfcq"] = cq_json("mfcq", pd.mfcq);
    cq["acq"] = pd.acq ? cq_json("acq", *pd.acq) : Json(nullptr);
    cq["gcq"] = pd.gcq ? cq_json("gcq", *pd.gcq) : Json(nullptr);
    if (!pd.cq_note.empty()) cq["note"] = pd.cq_note;
    pj["cq"] = cq;
    pairs.push_back(pj);
  }
  j["pairs"] = pairs;
  return j;
}

std::string solve_table_text(const SolveReport& rep) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "support" << std::setw(15) << "objective" << std::setw(13)
     << "kkt_resid" << std::setw(15) << "status" << std::setw(22) << "method"
     << "x\n";
  for (const SupportResult& s : rep.table) {
    std::ostringstream x;
    for (Index i = 0; i < s.x.size(); ++i) x << (i ? " " : "") << std::setprecision(6) << clean(s.x[i]);
    std::ostringstream obj, res;
    obj << std::setprecision(8) << clean(s.objective);
    res << std::setprecision(3) << clean(s.kkt_residual);
    os << std::left << std::setw(14) << format_indices(s.support) << std::setw(15) << obj.str()
       << std::setw(13) << res.str() << std::setw(15) << to_string(s.status) << std::setw(22)
       << s.method << x.str() << "\n";
  }
  if (rep.found) {
    os << "winner " << format_indices(rep.support) << " objective " << std::setprecision(10)
       << clean(rep.objective) << (rep.certified_global ? " (global)" : " (best found)") << "\n";
  } else {
    os << "no feasible support\n";
  }
  return os.str();
}

}  // namespace mpcac
