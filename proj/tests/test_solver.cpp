#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"
#include "mpcac/error.hpp"
#include "mpcac/solver.hpp"
#include "test_util.hpp"

using namespace mpcac;
using mpcac::testing::make_problem;
using mpcac::testing::Rng;
using mpcac::testing::vec;

namespace {

// f = sum_i (x_i - c_i)^2; the optimum keeps the alpha largest |c_i|.
Problem separable_quadratic(const Vec& c, int alpha) {
  std::string f = "(+";
  for (Index i = 0; i < c.size(); ++i)
    f += " (^ (+ x" + std::to_string(i + 1) + " " + std::to_string(-c[i]) + ") 2)";
  f += ")";
  return make_problem("sep", static_cast<int>(c.size()), alpha, f);
}

double separable_optimum(const Vec& c, int alpha) {
  std::vector<double> sq(static_cast<std::size_t>(c.size()));
  for (Index i = 0; i < c.size(); ++i) {
    // Parse-exact value, as written into the objective.
    const double ci = std::stod(std::to_string(c[i]));
    sq[static_cast<std::size_t>(i)] = ci * ci;
  }
  std::sort(sq.begin(), sq.end());
  double rest = 0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(alpha) < sq.size(); ++i) rest += sq[i];
  return rest;
}

}  // namespace

TEST_CASE("start points are deterministic") {
  const std::vector<Vec> a = start_points(3, 6), b = start_points(3, 6);
  REQUIRE(a.size() == 6);
  CHECK(a[0].isZero());
  CHECK(a[1].isApprox(Vec::Constant(3, 0.5)));
  CHECK(a[2].isApprox(Vec::Constant(3, -0.5)));
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  for (std::size_t k = 3; k < a.size(); ++k) CHECK(a[k].cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("active-set QP with one active constraint") {
  // min (x1 - 2)^2 + (x2 - 2)^2  s.t.  x1 + x2 <= 2 on support {1, 2}  ->  (1, 1, 0)
  const Problem p = make_problem("qp", 3, 2, "(+ (^ (+ x1 -2) 2) (^ (+ x2 -2) 2) (^ x3 2))",
                                 {"(+ x1 x2 -2)"});
  REQUIRE(is_affine_quadratic(p, {0, 1}));
  const QpResult r = solve_qp_affine(p, {0, 1});
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK_FALSE(r.fallback);
  CHECK(r.x[0] == doctest::Approx(1));
  CHECK(r.x[1] == doctest::Approx(1));
  CHECK(r.x[2] == 0.0);
  CHECK(r.objective == doctest::Approx(2));
  REQUIRE(r.lambda_g.size() == 1);
  CHECK(r.lambda_g[0] == doctest::Approx(2));
}

TEST_CASE("QP statuses and negative curvature") {
  const Problem lin = make_problem("lin", 2, 1, "(neg x1)");
  CHECK(solve_qp_affine(lin, {0}).status == SolveStatus::Unbounded);

  const Problem inf = make_problem("inf", 2, 1, "(^ x1 2)", {"(+ (neg x1) 1)", "x1"});
  CHECK(solve_qp_affine(inf, {0}).status == SolveStatus::Infeasible);

  // x1 x2 on the line x1 + x2 = 0 has negative curvature: minimum -1 at the box corners.
  const Problem saddle = make_problem("saddle", 3, 2, "(* x1 x2)", {"(+ x1 -1)", "(+ (neg x1) -1)"},
                                      {"(+ x1 x2)"});
  const QpResult r = solve_qp_affine(saddle, {0, 1});
  CHECK(r.objective == doctest::Approx(-1).epsilon(1e-5));
  CHECK(std::abs(r.x[0]) == doctest::Approx(1).epsilon(1e-5));

  CHECK_THROWS_AS(solve_qp_affine(make_problem("nl", 2, 1, "x1", {"(^ x1 2)"}), {0}), InvalidInput);
}

TEST_CASE("augmented Lagrangian on a nonlinear constraint") {
  // min (x1 - 2)^4 + x2^2 s.t. x1^2 + x2^2 <= 1  ->  (1, 0), f = 1
  const Problem p = make_problem("al", 3, 2, "(+ (^ (+ x1 -2) 4) (^ x2 2))",
                                 {"(+ (^ x1 2) (^ x2 2) -1)"});
  CHECK_FALSE(is_affine_quadratic(p, {0, 1}));
  const ReducedResult r = solve_reduced(p, {0, 1}, vec({0.3, 0.3, 0}));
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.x[0] == doctest::Approx(1).epsilon(1e-5));
  CHECK(std::abs(r.x[1]) <= 1e-5);
  CHECK(r.violation <= 1e-8);
  CHECK(r.kkt_residual <= 1e-6);
}

TEST_CASE("augmented Lagrangian reports infeasibility") {
  const Problem p = make_problem("inf", 2, 1, "(^ x1 2)", {"(+ (^ x1 2) 1)"});
  CHECK(solve_reduced(p, {0}, vec({0.5, 0})).status == SolveStatus::Infeasible);
}

TEST_CASE("brute force on separable quadratics keeps the largest targets") {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.integer(2, 6);
    const int alpha = rng.integer(1, n - 1);
    const Vec c = rng.vector(n, -2, 2);
    const Problem p = separable_quadratic(c, alpha);
    const SolveReport rep = solve_brute(p);
    REQUIRE(rep.found);
    CHECK(rep.certified_global);
    CHECK(rep.objective == doctest::Approx(separable_optimum(c, alpha)).epsilon(1e-7));
    CHECK(cardinality(rep.x, 1e-9) <= alpha);
  }
}

TEST_CASE("binary enumeration agrees with support enumeration") {
  const Problem p = make_problem("lng", 3, 2, "(+ (^ x1 2) (^ (+ x2 -1) 2) (^ (+ x3 -1) 2))",
                                 {"(+ x1 x2 x3 -2)"});
  const SolveReport brute = solve_brute(p);
  const MixedIntegerReport mi = solve_mixed_integer_enumeration(p);
  REQUIRE(brute.found);
  REQUIRE(mi.found);
  CHECK(mi.objective == doctest::Approx(brute.objective));
  CHECK(mi.assignments == 7);  // binary y with e^T y >= 1
}

TEST_CASE("ties go to the lexicographically first support") {
  const Problem p = make_problem("tie", 3, 1, "(+ (^ (+ x1 -1) 2) (^ (+ x2 -1) 2) (^ (+ x3 -1) 2))");
  const SolveReport rep = solve_brute(p);
  CHECK(rep.support == IndexList{0});
  CHECK(rep.ties.size() == 3);
  CHECK(rep.table.size() == 3);
}

TEST_CASE("support cap") {
  SolveOptions opts;
  opts.max_supports = 5;
  const Problem p = separable_quadratic(Vec::Ones(6), 3);  // C(6, 3) = 20
  CHECK_THROWS_AS(solve_brute(p, opts), CapExceeded);
}

TEST_CASE("diagnostic pairs every admissible binary y") {
  const Problem p = make_problem("d", 3, 2, "(+ (^ x1 2) (^ (+ x2 -1) 2) (^ x3 2))");
  const MpcacDiagnostic d = kkt_residual_mpcac_report(p, vec({0, 1, 0}));
  CHECK(d.cardinality == 1);
  CHECK_FALSE(d.companion_unique);
  // Zeros at 1 and 3; y on {1, 3} with e^T y >= 1: (1,0,0), (0,0,1), (1,0,1).
  CHECK(d.pairs.size() == 3);
  CHECK(std::count_if(d.pairs.begin(), d.pairs.end(), [](const PairDiagnostic& q) { return q.canonical; }) == 1);
  CHECK_THROWS_AS(kkt_residual_mpcac_report(p, vec({1, 1, 1})), InfeasiblePoint);
}
