#include "mpcac/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "mpcac/error.hpp"
#include "mpcac/solver.hpp"
#include "mpcac/stationarity.hpp"

namespace mpcac {

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

Mat rows(Index cols, std::initializer_list<std::initializer_list<double>> r) {
  Mat out(static_cast<Index>(r.size()), cols);
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double d : row) out(i, j++) = d;
    ++i;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string fmt(const Vec& v) {
  std::string s = "(";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + ")";
}

bool near(const Vec& a, const Vec& b, double tol) {
  return a.size() == b.size() && (a.size() == 0 || (a - b).cwiseAbs().maxCoeff() <= tol);
}

FactOutcome expect(bool ok, std::string observed) { return {ok, std::move(observed)}; }

Problem make_problem(const std::string& name, int n, int alpha, const std::string& f,
                     const std::vector<std::string>& g, const std::vector<std::string>& h = {}) {
  std::vector<Expr> ge, he;
  for (const auto& s : g) ge.push_back(parse_expr(s, n));
  for (const auto& s : h) he.push_back(parse_expr(s, n));
  return Problem(name, n, alpha, parse_expr(f, n), ge, he);
}

Problem wstat_problem(int n) {
  std::string f = "(+";
  for (int i = 1; i <= n; ++i) f += " x" + std::to_string(i);
  f += ")";
  std::vector<std::string> g;
  for (int i = 1; i < n; ++i)
    g.push_back("(+ (neg x" + std::to_string(i) + ") (^ x" + std::to_string(n) + " 2))");
  return make_problem("wstat-family-n" + std::to_string(n), n, n - 1, f, g);
}

AffinePairSet pair_set(int n, Mat ineq, Vec ineq_rhs, Mat eq, Vec eq_rhs) {
  AffinePairSet s;
  s.n = n;
  s.ineq = std::move(ineq);
  s.ineq_rhs = std::move(ineq_rhs);
  s.eq = eq.rows() > 0 ? std::move(eq) : Mat(0, 2 * n);
  s.eq_rhs = std::move(eq_rhs);
  for (Index k = 0; k < s.ineq.rows(); ++k) s.ineq_labels.push_back("row" + std::to_string(k + 1));
  for (Index k = 0; k < s.eq.rows(); ++k) s.eq_labels.push_back("eq" + std::to_string(k + 1));
  return s;
}

// ---- reusable facts ---------------------------------------------------------

Fact brute_fact(Vec x_star, double f_star) {
  return {"brute-global", "support enumeration returns x* = " + fmt(x_star) + ", f* = " + num(f_star),
          [x_star, f_star](const CorpusCase& c) {
            const SolveReport r = solve_brute(*c.problem);
            return expect(r.found && near(r.x, x_star, 1e-6) && std::abs(r.objective - f_star) <= 1e-6,
                          "x* = " + fmt(r.x) + ", f* = " + num(r.objective) +
                              (r.certified_global ? " (global)" : " (best found)"));
          }};
}

Fact binary_enumeration_fact() {
  return {"binary-enumeration-agrees",
          "exhaustive binary-y enumeration matches the support enumeration within 1e-6",
          [](const CorpusCase& c) {
            const SolveReport r = solve_brute(*c.problem);
            const MixedIntegerReport mi = solve_mixed_integer_enumeration(*c.problem);
            return expect(r.found && mi.found && std::abs(r.objective - mi.objective) <= 1e-6,
                          "supports " + num(r.objective) + ", binary y " + num(mi.objective) +
                              " over " + std::to_string(mi.assignments) + " assignments");
          }};
}

Fact condition_fact(const std::string& label, Condition cond, bool holds) {
  const std::string name = to_string(cond);
  return {name + "-" + (holds ? "holds" : "fails") + "@" + label,
          name + (cond == Condition::KktRelaxed ? " of the relaxed problem " : "-stationarity ") +
              (holds ? "holds" : "fails") + " at " + label,
          [label, cond, holds](const CorpusCase& c) {
            const PairPoint& pt = c.point(label);
            StationarityCertificate cert;
            switch (cond) {
              case Condition::S:
                cert = check_s_stationary(*c.problem, pt);
                break;
              case Condition::M:
                cert = check_m_stationary(*c.problem, pt);
                break;
              default:
                cert = check_kkt_relaxed(*c.problem, pt);
                break;
            }
            const bool residual_ok = !cert.holds() || cert.stationarity_residual <= cert.tol.cert;
            return expect(cert.holds() == holds && residual_ok,
                          std::string(to_string(cert.verdict)) + " with I = " + format_indices(cert.I) +
                              ", residual " + num(cert.stationarity_residual));
          }};
}

CqVerdict run_cq(const CorpusCase& c, const std::string& which, const PairPoint& pt) {
  if (which == "licq") return check_licq(*c.problem, pt);
  if (which == "mfcq") return check_mfcq(*c.problem, pt);
  if (c.set) return which == "acq" ? check_acq(*c.set, pt) : check_gcq(*c.set, pt);
  return which == "acq" ? check_acq(*c.problem, pt) : check_gcq(*c.problem, pt);
}

Fact cq_fact(const std::string& label, const std::string& which, bool holds) {
  return {which + "-" + (holds ? "holds" : "fails") + "@" + label,
          which + " " + (holds ? "holds" : "fails") + " at " + label,
          [label, which, holds](const CorpusCase& c) {
            const CqVerdict v = run_cq(c, which, c.point(label));
            return expect(v.holds == holds, std::string(v.holds ? "holds" : "fails") + " (" +
                                                (v.exact ? "exact" : "sampled") + "): " + v.detail);
          }};
}

Fact cq_chain_fact(const std::string& label) {
  return {"cq-chain@" + label, "LICQ => MFCQ => ACQ => GCQ verdicts are monotone at " + label,
          [label](const CorpusCase& c) {
            const PairPoint& pt = c.point(label);
            const bool licq = run_cq(c, "licq", pt).holds;
            const bool mfcq = run_cq(c, "mfcq", pt).holds;
            const bool acq = run_cq(c, "acq", pt).holds;
            const bool gcq = run_cq(c, "gcq", pt).holds;
            const bool ok = (!licq || mfcq) && (!mfcq || acq) && (!acq || gcq);
            auto b = [](bool v) { return v ? "holds" : "fails"; };
            return expect(ok, std::string("LICQ ") + b(licq) + ", MFCQ " + b(mfcq) + ", ACQ " +
                                  b(acq) + ", GCQ " + b(gcq));
          }};
}

Fact minimal_sets_fact(const std::string& label, std::vector<IndexList> expected) {
  std::string shown;
  for (const auto& I : expected) shown += format_indices(I);
  return {"profile-minimal@" + label, "minimal stationary index sets at " + label + " are " + shown,
          [label, expected](const CorpusCase& c) {
            const StationarityProfile prof = stationarity_profile(*c.problem, c.point(label));
            std::string got;
            for (const auto& I : prof.minimal) got += format_indices(I);
            return expect(prof.minimal == expected, "minimal " + got + " over " +
                                                        std::to_string(prof.entries.size()) +
                                                        " admissible sets");
          }};
}

// ---- the cases ---------------------------------------------------------------

CorpusCase case_ynotbinary() {
  CorpusCase c;
  c.id = "ynotbinary";
  c.citation = "relaxed global solution whose y is not binary";
  c.problem = make_problem(c.id, 3, 2, "(+ (^ (+ x1 -1) 2) (^ (+ x2 -1) 2) (^ x3 2))", {"x1"});
  c.points = {{"pair", {vec({0, 1, 0}), vec({0.5, 0, 0.5})}}};
  c.facts.push_back({"relaxed-feasible@pair", "x = (0,1,0), y = (0.5,0,0.5) is relaxed-feasible",
                     [](const CorpusCase& k) {
                       const bool ok = is_feasible_relaxed(*k.problem, k.point("pair"));
                       return expect(ok, ok ? "feasible" : "infeasible");
                     }});
  c.facts.push_back({"not-mixed-integer@pair", "the same pair violates the binary restriction",
                     [](const CorpusCase& k) {
                       const double v =
                           max_violation(build_mixed_integer(*k.problem), k.point("pair").stacked());
                       return expect(v > 1e-8, "violation " + num(v));
                     }});
  c.facts.push_back({"qp-support-2", "exact path on support {2} gives x = (0,1,0), f = 1",
                     [](const CorpusCase& k) {
                       const QpResult q = solve_qp_affine(*k.problem, {1});
                       return expect(near(q.x, vec({0, 1, 0}), 1e-9) && std::abs(q.objective - 1) <= 1e-9,
                                     "x = " + fmt(q.x) + ", f = " + num(q.objective));
                     }});
  c.facts.push_back(brute_fact(vec({0, 1, 0}), 1.0));
  c.facts.push_back({"pair-attains-optimum", "the non-binary pair attains the global optimal value",
                     [](const CorpusCase& k) {
                       const double fp = eval(k.problem->f(), k.point("pair").x);
                       const SolveReport r = solve_brute(*k.problem);
                       return expect(std::abs(fp - r.objective) <= 1e-6,
                                     "f(pair) = " + num(fp) + ", f* = " + num(r.objective));
                     }});
  c.facts.push_back(binary_enumeration_fact());
  c.facts.push_back(condition_fact("pair", Condition::S, true));
  c.facts.push_back(condition_fact("pair", Condition::KktRelaxed, true));
  c.facts.push_back(cq_fact("pair", "licq", false));
  c.facts.push_back(cq_fact("pair", "mfcq", false));
  c.facts.push_back(cq_fact("pair", "gcq", true));
  c.facts.push_back(cq_chain_fact("pair"));
  return c;
}

CorpusCase case_local_not_global() {
  CorpusCase c;
  c.id = "local-not-global";
  c.citation = "relaxed local solution that is not a local MPCaC minimizer";
  c.problem = make_problem(c.id, 3, 2, "(+ (^ x1 2) (^ (+ x2 -1) 2) (^ (+ x3 -1) 2))", {"x1"});
  c.points = {{"pair", {vec({0, 1, 0}), vec({0.5, 0, 0.5})}}};
  c.facts.push_back(brute_fact(vec({0, 1, 1}), 0.0));
  c.facts.push_back({"qp-support-23", "exact path on support {2,3} gives x = (0,1,1), f = 0",
                     [](const CorpusCase& k) {
                       const QpResult q = solve_qp_affine(*k.problem, {1, 2});
                       return expect(near(q.x, vec({0, 1, 1}), 1e-9) && std::abs(q.objective) <= 1e-9,
                                     "x = " + fmt(q.x) + ", f = " + num(q.objective));
                     }});
  c.facts.push_back({"mpcac-feasible@pair", "x = (0,1,0) is feasible for the MPCaC",
                     [](const CorpusCase& k) {
                       const bool ok = is_feasible_mpcac(*k.problem, k.point("pair").x);
                       return expect(ok, ok ? "feasible" : "infeasible");
                     }});
  c.facts.push_back({"companion-not-unique@pair", "||x||_0 = 1 < alpha, so y is not unique",
                     [](const CorpusCase& k) {
                       const CompanionY cy = companion_y(k.point("pair").x, k.problem->alpha(), 1e-9);
                       return expect(!cy.unique, std::string(cy.unique ? "unique" : "not unique") +
                                                     ", canonical y = " + fmt(cy.y));
                     }});
  c.facts.push_back({"nearby-improvement@pair",
                     "x_delta = (0,1,delta) is feasible and strictly better for delta = 1e-3",
                     [](const CorpusCase& k) {
                       const Vec xd = vec({0, 1, 1e-3});
                       const double f0 = eval(k.problem->f(), k.point("pair").x);
                       const double fd = eval(k.problem->f(), xd);
                       return expect(is_feasible_mpcac(*k.problem, xd) && fd < f0,
                                     "f(x) = " + num(f0) + ", f(x_delta) = " + num(fd));
                     }});
  c.facts.push_back({"relaxed-feasible@pair", "the pair is relaxed-feasible with objective 1",
                     [](const CorpusCase& k) {
                       const bool ok = is_feasible_relaxed(*k.problem, k.point("pair"));
                       const double f = eval(k.problem->f(), k.point("pair").x);
                       return expect(ok && std::abs(f - 1.0) <= 1e-12,
                                     std::string(ok ? "feasible" : "infeasible") + ", f = " + num(f));
                     }});
  c.facts.push_back(binary_enumeration_fact());
  return c;
}

CorpusCase case_linear_not_guignard() {
  CorpusCase c;
  c.id = "linear-not-guignard";
  c.citation = "complementarity set with linear rows where GCQ fails";
  c.set = pair_set(1, rows(2, {{-1, 0}, {0, -1}, {-1, 1}}), Vec::Zero(3), Mat(0, 2), Vec(0));
  c.points = {{"origin", {vec({0}), vec({0})}}};
  c.facts.push_back({"tangent-cone", "tangent cone at 0 is {d1 >= 0, d2 = 0}",
                     [](const CorpusCase& k) {
                       const ConeUnion t = tangent_cone_pieces(*k.set, k.point("origin"));
                       const PolyhedralCone expected(2, rows(2, {{0, 1}}), rows(2, {{-1, 0}}));
                       bool ok = t.pieces.size() == 2;
                       std::string obs;
                       Mat all(2, 0);
                       for (const auto& piece : t.pieces) {
                         const Generators& g = piece.generators();
                         ok = ok && g.lineality.cols() == 0 && cone_includes(expected, piece);
                         Mat next(2, all.cols() + g.rays.cols());
                         next << all, g.rays;
                         all = next;
                       }
                       ok = ok && all.cols() == 1 && near(all.col(0), vec({1, 0}), 1e-9);
                       for (Index j = 0; j < all.cols(); ++j) obs += fmt(all.col(j));
                       return expect(ok, "union generated by " + obs);
                     }});
  c.facts.push_back({"linearized-cone", "linearized cone at 0 is {0 <= d2 <= d1}, rays (1,0) and (1,1)",
                     [](const CorpusCase& k) {
                       const PolyhedralCone d = linearized_cone(*k.set, k.point("origin"));
                       const PolyhedralCone expected(2, Mat(0, 2), rows(2, {{0, -1}, {-1, 1}}));
                       const Generators& g = d.generators();
                       std::string obs;
                       bool has10 = false, has11 = false;
                       for (Index j = 0; j < g.rays.cols(); ++j) {
                         obs += fmt(g.rays.col(j));
                         has10 = has10 || near(g.rays.col(j), vec({1, 0}), 1e-9);
                         has11 = has11 || near(g.rays.col(j), vec({1, 1}), 1e-9);
                       }
                       return expect(cones_equal(d, expected) && g.rays.cols() == 2 && has10 && has11 &&
                                         g.lineality.cols() == 0,
                                     "rays " + obs);
                     }});
  c.facts.push_back(cq_fact("origin", "gcq", false));
  c.facts.push_back(cq_fact("origin", "acq", false));
  c.facts.push_back({"not-separable", "the row -x + y <= 0 couples x and y",
                     [](const CorpusCase& k) {
                       return expect(!k.set->separable(), k.set->separable() ? "separable" : "coupled");
                     }});
  return c;
}

CorpusCase case_acq_axis() {
  CorpusCase c;
  c.id = "acq-axis";
  c.citation = "ACQ holds although I00 is nonempty (x = 0, 0 <= y <= 1)";
  c.set = pair_set(1, rows(2, {{0, -1}, {0, 1}}), vec({0, 1}), rows(2, {{1, 0}}), vec({0}));
  c.points = {{"origin", {vec({0}), vec({0})}}};
  c.facts.push_back({"i00-nonempty@origin", "I00 = {1} at the origin", [](const CorpusCase& k) {
                       const IndexSets s = index_sets(k.point("origin"), 1e-9);
                       return expect(s.i00 == IndexList{0}, "I00 = " + format_indices(s.i00));
                     }});
  c.facts.push_back(cq_fact("origin", "acq", true));
  c.facts.push_back(cq_fact("origin", "gcq", true));
  return c;
}

CorpusCase case_acq_box() {
  CorpusCase c;
  c.id = "acq-box";
  c.citation = "ACQ fails on the box with complementarity (0 <= x, y <= 1)";
  c.set = pair_set(1, rows(2, {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}), vec({0, 1, 0, 1}), Mat(0, 2), Vec(0));
  c.points = {{"origin", {vec({0}), vec({0})}}};
  c.facts.push_back(cq_fact("origin", "acq", false));
  c.facts.push_back(cq_fact("origin", "gcq", true));
  c.facts.push_back({"separable", "every row touches only x or only y", [](const CorpusCase& k) {
                       return expect(k.set->separable(), k.set->separable() ? "separable" : "coupled");
                     }});
  return c;
}

CorpusCase case_free_x() {
  CorpusCase c;
  c.id = "free-x-acq";
  c.citation = "X = R^n: ACQ holds exactly when I00 is empty";
  c.problem = make_problem(c.id, 2, 1, "(+ (^ (+ x1 -1) 2) (^ x2 2))", {});
  c.points = {{"degenerate", {vec({0, 0}), vec({0, 1})}}, {"winner", {vec({1, 0}), vec({0, 1})}}};
  c.facts.push_back(brute_fact(vec({1, 0}), 0.0));
  c.facts.push_back(cq_fact("degenerate", "acq", false));
  c.facts.push_back(cq_fact("winner", "acq", true));
  c.facts.push_back(cq_fact("degenerate", "gcq", true));
  c.facts.push_back(cq_chain_fact("degenerate"));
  c.facts.push_back(cq_chain_fact("winner"));
  return c;
}

CorpusCase case_affine_guignard() {
  CorpusCase c;
  c.id = "affine-guignard";
  c.citation = "affine constraints: GCQ everywhere, so the minimizer is KKT";
  c.problem = make_problem(c.id, 3, 1, "(+ (^ (+ x1 -1) 2) (^ (+ x2 -2) 2) (^ x3 2))",
                           {"(+ x1 x2 x3 -1)"});
  c.points = {{"winner", {vec({0, 1, 0}), vec({1, 0, 1})}},
              {"degenerate", {vec({0, 0, 0}), vec({1, 0, 1})}}};
  c.facts.push_back(brute_fact(vec({0, 1, 0}), 2.0));
  c.facts.push_back({"certified-global", "every support goes through the exact convex path",
                     [](const CorpusCase& k) {
                       const SolveReport r = solve_brute(*k.problem);
                       return expect(r.certified_global, r.certified_global ? "global" : "best found");
                     }});
  c.facts.push_back(condition_fact("winner", Condition::KktRelaxed, true));
  c.facts.push_back(cq_fact("winner", "gcq", true));
  c.facts.push_back(cq_fact("degenerate", "gcq", true));
  c.facts.push_back(cq_fact("winner", "acq", true));
  c.facts.push_back(cq_fact("winner", "licq", false));
  c.facts.push_back(cq_fact("winner", "mfcq", false));
  c.facts.push_back(cq_chain_fact("winner"));
  c.facts.push_back(cq_chain_fact("degenerate"));
  return c;
}

CorpusCase case_not_gcq() {
  CorpusCase c;
  c.id = "not-gcq";
  c.citation = "global minimizer that is not KKT: S fails, M holds";
  c.problem = make_problem(c.id, 2, 1, "(+ x1 x2)", {"(+ (neg x1) (^ x2 2))"});
  c.points = {{"solution", {vec({0, 0}), vec({1, 0})}}};
  c.facts.push_back(brute_fact(vec({0, 0}), 0.0));
  c.facts.push_back(condition_fact("solution", Condition::KktRelaxed, false));
  c.facts.push_back(condition_fact("solution", Condition::S, false));
  c.facts.push_back(condition_fact("solution", Condition::M, true));
  c.facts.push_back(minimal_sets_fact("solution", {{0, 1}}));
  c.facts.push_back({"minimizer-not-kkt", "the brute-force minimizer paired with y = (1,0) is not KKT",
                     [](const CorpusCase& k) {
                       const SolveReport r = solve_brute(*k.problem);
                       const PairPoint pt{r.x, vec({1, 0})};
                       const bool kkt = check_kkt_relaxed(*k.problem, pt).holds();
                       return expect(near(r.x, k.point("solution").x, 1e-9) && !kkt,
                                     "x* = " + fmt(r.x) + ", KKT " + (kkt ? "holds" : "fails"));
                     }});
  c.facts.push_back({"tightened-kkt@solution", "KKT holds for the tightened problem with I = I0",
                     [](const CorpusCase& k) {
                       const PairPoint& pt = k.point("solution");
                       const IndexSets s = index_sets(pt, 1e-9);
                       const KktSystemResult r =
                           kkt_feasibility(build_tightened(*k.problem, pt, s.i0), pt.stacked());
                       return expect(r.holds, std::string(r.holds ? "holds" : "fails") + ", residual " +
                                                  num(r.residual));
                     }});
  c.facts.push_back({"diagnostic-profile", "diagnostic report: y = (1,0) has S failing and M holding",
                     [](const CorpusCase& k) {
                       const MpcacDiagnostic d = kkt_residual_mpcac_report(*k.problem, vec({0, 0}));
                       for (const PairDiagnostic& pd : d.pairs)
                         if (near(pd.y, vec({1, 0}), 0.0))
                           return expect(!pd.s.holds() && pd.m.holds(),
                                         std::string("S ") + to_string(pd.s.verdict) + ", M " +
                                             to_string(pd.m.verdict));
                       return expect(false, "no entry for y = (1,0)");
                     }});
  c.facts.push_back({"strict-complementarity-row", "canonical y = (1,1) gives a single-row profile",
                     [](const CorpusCase& k) {
                       const MpcacDiagnostic d = kkt_residual_mpcac_report(*k.problem, vec({0, 0}));
                       for (const PairDiagnostic& pd : d.pairs)
                         if (pd.canonical)
                           return expect(pd.profile.entries.size() == 1 && pd.s.holds(),
                                         std::to_string(pd.profile.entries.size()) + " row(s), S " +
                                             to_string(pd.s.verdict));
                       return expect(false, "no canonical entry");
                     }});
  c.facts.push_back({"acq-refused", "ACQ with a nonlinear row is refused", [](const CorpusCase& k) {
                       try {
                         check_acq(*k.problem, k.point("solution"));
                       } catch (const OutOfScope& e) {
                         return expect(true, e.what());
                       }
                       return expect(false, "decided instead of refused");
                     }});
  c.facts.push_back(binary_enumeration_fact());
  return c;
}

CorpusCase case_wstat(int n) {
  CorpusCase c;
  c.id = "wstat-family-n" + std::to_string(n);
  c.citation = "W_I-stationarity holds exactly when n is in I";
  c.problem = wstat_problem(n);
  Vec y = Vec::Zero(n);
  y[0] = 1.0;
  c.points = {{"solution", {Vec::Zero(n), y}}};
  c.facts.push_back({"index-sets@solution", "I0 = {1..n}, I01 = {1}, I00 = {2..n}, I0+ empty",
                     [n](const CorpusCase& k) {
                       const IndexSets s = index_sets(k.point("solution"), 1e-9);
                       IndexList all, rest;
                       for (int i = 0; i < n; ++i) all.push_back(i);
                       for (int i = 1; i < n; ++i) rest.push_back(i);
                       return expect(s.i0 == all && s.i01 == IndexList{0} && s.i00 == rest && s.i0plus.empty(),
                                     "I0 " + format_indices(s.i0) + ", I01 " + format_indices(s.i01) +
                                         ", I00 " + format_indices(s.i00));
                     }});
  c.facts.push_back({"w-iff-n-in-I", "every admissible I: W_I holds iff n is in I",
                     [n](const CorpusCase& k) {
                       const StationarityProfile prof = stationarity_profile(*k.problem, k.point("solution"));
                       int bad = 0;
                       for (const ProfileEntry& e : prof.entries) {
                         const bool has_n = std::binary_search(e.I.begin(), e.I.end(), n - 1);
                         if ((e.verdict == Verdict::Holds) != has_n) ++bad;
                       }
                       return expect(bad == 0 && prof.entries.size() == (1u << (n - 1)),
                                     std::to_string(prof.entries.size()) + " sets, " +
                                         std::to_string(bad) + " mismatches");
                     }});
  c.facts.push_back(minimal_sets_fact("solution", {{0, n - 1}}));
  if (n == 3) {
    c.facts.push_back(brute_fact(Vec::Zero(3), 0.0));
    c.facts.push_back(binary_enumeration_fact());
    c.facts.push_back({"explicit-multipliers", "lambda_g = (1,1), gamma_3 = -1, gamma_1 = 0 solve W_{1,3}",
                       [](const CorpusCase& k) {
                         const PairPoint& pt = k.point("solution");
                         Vec r = grad(k.problem->f(), pt.x);
                         for (const Expr& g : k.problem->g()) r += grad(g, pt.x);
                         r[2] -= 1.0;
                         const StationarityCertificate cert = check_w_stationary(*k.problem, pt, {0, 2});
                         return expect(r.cwiseAbs().maxCoeff() <= 1e-12 && cert.holds(),
                                       "residual of the explicit multipliers " + num(r.cwiseAbs().maxCoeff()) +
                                           ", certificate " + to_string(cert.verdict));
                       }});
    c.facts.push_back({"full-multipliers", "completed multipliers have theta, H, Htilde zero and pass all items",
                       [](const CorpusCase& k) {
                         const PairPoint& pt = k.point("solution");
                         const StationarityCertificate full =
                             recover_full_multipliers(check_w_stationary(*k.problem, pt, {0, 2}), *k.problem, pt);
                         const FullMultipliers& m = *full.full;
                         const double worst = *std::max_element(m.items.begin(), m.items.end());
                         const bool zero = m.theta == 0.0 && m.H.cwiseAbs().sum() == 0.0 &&
                                           m.Htilde.cwiseAbs().sum() == 0.0;
                         return expect(zero && worst <= 1e-7, "largest item residual " + num(worst));
                       }});
    c.facts.push_back({"diagnostic-minimal", "diagnostic report at x* with y = e1: minimal I = {1,3}",
                       [](const CorpusCase& k) {
                         const MpcacDiagnostic d = kkt_residual_mpcac_report(*k.problem, Vec::Zero(3));
                         for (const PairDiagnostic& pd : d.pairs)
                           if (near(pd.y, vec({1, 0, 0}), 0.0))
                             return expect(pd.profile.minimal == std::vector<IndexList>{{0, 2}},
                                           "minimal " + (pd.profile.minimal.empty()
                                                             ? std::string("none")
                                                             : format_indices(pd.profile.minimal[0])));
                         return expect(false, "no entry for y = e1");
                       }});
  }
  return c;
}

std::vector<CorpusCase> build_corpus() {
  std::vector<CorpusCase> out;
  out.push_back(case_ynotbinary());
  out.push_back(case_local_not_global());
  out.push_back(case_linear_not_guignard());
  out.push_back(case_acq_axis());
  out.push_back(case_acq_box());
  out.push_back(case_free_x());
  out.push_back(case_affine_guignard());
  out.push_back(case_not_gcq());
  for (int n = 3; n <= 6; ++n) out.push_back(case_wstat(n));
  return out;
}

}  // namespace

const PairPoint& CorpusCase::point(const std::string& label) const {
  for (const NamedPoint& p : points)
    if (p.label == label) return p.point;
  throw InvalidInput("case " + id + " has no point '" + label + "'");
}

const std::vector<CorpusCase>& corpus_cases() {
  static const std::vector<CorpusCase> cases = build_corpus();
  return cases;
}

bool CaseResult::pass() const {
  return std::all_of(facts.begin(), facts.end(), [](const FactResult& f) { return f.pass; });
}

CorpusRun run_corpus(const std::string& prefix) {
  CorpusRun run;
  for (const CorpusCase& c : corpus_cases()) {
    if (c.id.compare(0, prefix.size(), prefix) != 0) continue;
    CaseResult cr;
    cr.id = c.id;
    cr.citation = c.citation;
    for (const Fact& f : c.facts) {
      FactResult fr;
      fr.id = f.id;
      fr.description = f.description;
      try {
        const FactOutcome o = f.check(c);
        fr.pass = o.pass;
        fr.observed = o.observed;
      } catch (const std::exception& e) {
        fr.pass = false;
        fr.observed = std::string("error: ") + e.what();
      }
      ++run.facts;
      if (!fr.pass) ++run.failed;
      cr.facts.push_back(std::move(fr));
    }
    run.cases.push_back(std::move(cr));
  }
  return run;
}

Json corpus_json(const CorpusRun& run) {
  Json j = report_header("corpus");
  Json cases = Json::array();
  for (const CaseResult& c : run.cases) {
    Json cj;
    cj["id"] = c.id;
    cj["citation"] = c.citation;
    cj["pass"] = c.pass();
    Json facts = Json::array();
    for (const FactResult& f : c.facts) {
      Json fj;
      fj["id"] = f.id;
      fj["description"] = f.description;
      fj["pass"] = f.pass;
      fj["observed"] = f.observed;
      facts.push_back(fj);
    }
    cj["facts"] = facts;
    cases.push_back(cj);
  }
  j["cases"] = cases;
  Json s;
  s["cases"] = run.cases.size();
  s["facts"] = run.facts;
  s["failed"] = run.failed;
  j["summary"] = s;
  return j;
}

std::string corpus_table(const CorpusRun& run) {
  std::ostringstream os;
  for (const CaseResult& c : run.cases) {
    os << (c.pass() ? "PASS " : "FAIL ") << c.id << "  -- " << c.citation << "\n";
    for (const FactResult& f : c.facts)
      os << "  " << (f.pass ? "ok   " : "FAIL ") << f.id << ": " << f.observed << "\n";
  }
  os << run.cases.size() << " cases, " << run.facts << " facts, " << run.failed << " failed\n";
  return os.str();
}

AffinePairSet pair_set_from_json(const Json& doc) {
  if (!doc.is_object() || doc.value("kind", "") != "pair-set")
    throw InvalidInput("pair-set document needs \"kind\": \"pair-set\"");
  if (doc.value("format", "") != kDataFormat)
    throw InvalidInput(std::string("field 'format' must be \"") + kDataFormat + "\"");
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<int>() < 1)
    throw InvalidInput("field 'n' must be a positive integer");
  const int n = doc["n"].get<int>();
  auto matrix = [&](const char* key) {
    Mat M(0, 2 * n);
    if (!doc.contains(key)) return M;
    const Json& a = doc[key];
    if (!a.is_array()) throw InvalidInput(std::string("field '") + key + "' must be an array of rows");
    M.resize(static_cast<Index>(a.size()), 2 * n);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (!a[r].is_array() || static_cast<int>(a[r].size()) != 2 * n)
        throw InvalidInput(std::string("rows of '") + key + "' need 2n entries");
      for (int c = 0; c < 2 * n; ++c) M(static_cast<Index>(r), c) = a[r][c].get<double>();
    }
    return M;
  };
  auto vector = [&](const char* key, Index len) {
    Vec v = Vec::Zero(len);
    if (!doc.contains(key)) {
      if (len > 0) throw InvalidInput(std::string("missing field '") + key + "'");
      return v;
    }
    const Json& a = doc[key];
    if (!a.is_array() || static_cast<Index>(a.size()) != len)
      throw InvalidInput(std::string("field '") + key + "' must match the row count");
    for (Index i = 0; i < len; ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
    return v;
  };
  const Mat ineq = matrix("ineq");
  const Mat eq = matrix("eq");
  return pair_set(n, ineq, vector("ineq_rhs", ineq.rows()), eq, vector("eq_rhs", eq.rows()));
}

Json pair_set_to_json(const AffinePairSet& s, const std::string& name) {
  Json j;
  j["format"] = kDataFormat;
  j["kind"] = "pair-set";
  j["name"] = name;
  j["n"] = s.n;
  auto mat = [](const Mat& M) {
    Json out = Json::array();
    for (Index r = 0; r < M.rows(); ++r) out.push_back(vector_json(M.row(r).transpose()));
    return out;
  };
  j["ineq"] = mat(s.ineq);
  j["ineq_rhs"] = vector_json(s.ineq_rhs);
  j["eq"] = mat(s.eq);
  j["eq_rhs"] = vector_json(s.eq_rhs);
  return j;
}

std::vector<std::string> export_corpus(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  for (const CorpusCase& c : corpus_cases()) {
    const std::string base = (std::filesystem::path(dir) / c.id).string();
    if (c.problem) {
      write_text_file(base + ".problem.json", problem_to_json(*c.problem).dump(2) + "\n");
      written.push_back(c.id + ".problem.json");
    } else {
      write_text_file(base + ".set.json", pair_set_to_json(*c.set, c.id).dump(2) + "\n");
      written.push_back(c.id + ".set.json");
    }
    Json pts = Json::array();
    for (const NamedPoint& p : c.points) {
      Json pj = point_to_json(p.point);
      pj["label"] = p.label;
      pts.push_back(pj);
    }
    write_text_file(base + ".points.json", pts.dump(2) + "\n");
    written.push_back(c.id + ".points.json");
  }
  return written;
}

}  // namespace mpcac
