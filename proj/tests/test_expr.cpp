#include <cmath>
#include <cstring>

#include "doctest.h"
#include "mpcac/error.hpp"
#include "mpcac/expr.hpp"
#include "test_util.hpp"

using namespace mpcac;

namespace {
Vec v(std::initializer_list<double> xs) {
  Vec r(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}
}  // namespace

TEST_CASE("parse: sum of two variables") {
  Expr e = parse_expr("(+ x1 x2)", 2);
  REQUIRE(e.kind() == Expr::Kind::Sum);
  REQUIRE(e.children().size() == 2);
  CHECK(e.children()[0].kind() == Expr::Kind::Variable);
  CHECK(e.children()[0].index() == 0);
  CHECK(e.children()[1].index() == 1);
  CHECK(to_string(e) == "(+ x1 x2)");
}

TEST_CASE("parse: nonlinear constraint -x1 + x2^2") {
  Expr g = parse_expr("(+ (neg x1) (^ x2 2))", 2);
  CHECK(to_string(g) == "(+ (neg x1) (^ x2 2))");
  CHECK(to_infix(g) == "-x1 + x2^2");
  CHECK(eval(g, v({0.0, 0.0})) == 0.0);
  CHECK(eval(g, v({1.0, 3.0})) == 8.0);
  CHECK(g.degree() == 2);
}

TEST_CASE("parse: exponent one is the identity") {
  Expr e = parse_expr("(^ x1 1)", 1);
  CHECK(e.kind() == Expr::Kind::Power);
  CHECK(e.exponent() == 1);
  CHECK(eval(e, v({-2.5})) == -2.5);
  CHECK(grad(e, v({-2.5}))[0] == 1.0);
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    parse_expr("(+ x1 x3)", 2);
    FAIL("expected out-of-range error");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 6);
  }
  try {
    parse_expr("(+ x1 (foo x2))", 2);
    FAIL("expected unknown operator");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 7);
  }
  CHECK_THROWS_AS(parse_expr("(+ x1", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("(^ x1 0)", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("(^ x1 1.5)", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("(neg x1 x2)", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("(+)", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x1 x2", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("x0", 2), ParseError);
  CHECK_THROWS_AS(parse_expr("1.2.3", 2), ParseError);
}

TEST_CASE("eval: direct substitution") {
  CHECK(eval(parse_expr("(+ x1 x2)", 2), v({0, 0})) == 0.0);
  Expr f = parse_expr("(+ (^ (+ x1 -1) 2) (^ (+ x2 -1) 2) (^ x3 2))", 3);
  CHECK(eval(f, v({0, 1, 0})) == 1.0);
  CHECK(eval(Expr::constant(5.0), v({7, 8})) == 5.0);
  CHECK_THROWS_AS(eval(f, v({0, 1})), InvalidInput);
}

TEST_CASE("grad: polynomial rules") {
  Expr g = parse_expr("(+ (neg x1) (^ x2 2))", 2);
  Vec d = grad(g, v({0, 0}));
  CHECK(d[0] == -1.0);
  CHECK(d[1] == 0.0);

  Expr f = parse_expr("(+ x1 x2)", 2);
  Vec d2 = grad(f, v({3.5, -7.0}));
  CHECK(d2[0] == 1.0);
  CHECK(d2[1] == 1.0);

  // g_i = -x_i + x_n^2 at the origin has gradient -e_i.
  const int n = 5;
  for (int i = 1; i < n; ++i) {
    Expr gi = parse_expr("(+ (neg x" + std::to_string(i) + ") (^ x5 2))", n);
    Vec gd = grad(gi, Vec::Zero(n));
    for (int j = 0; j < n; ++j) CHECK(gd[j] == (j == i - 1 ? -1.0 : 0.0));
  }

  // Product rule with a zero factor must not divide.
  Expr p = parse_expr("(* x1 x2 x3)", 3);
  Vec pd = grad(p, v({0, 2, 3}));
  CHECK(pd[0] == 6.0);
  CHECK(pd[1] == 0.0);
  CHECK(pd[2] == 0.0);
}

TEST_CASE("grad_check against central differences") {
  Expr aff = Expr::affine({{0, 2.0}, {2, -3.0}}, 1.5);
  CHECK(grad_check(aff, v({0.3, -1.1, 0.7}), 1e-6) <= 1e-9);

  Expr sq = parse_expr("(^ x2 2)", 2);
  CHECK(grad(sq, v({0, 1}))[1] == 2.0);
  CHECK(grad_check(sq, v({0, 1}), 1e-6) <= 1e-6);

  Expr bil = parse_expr("(* x1 x2)", 2);
  Vec b = grad(bil, v({3, 5}));
  CHECK(b[0] == 5.0);
  CHECK(b[1] == 3.0);
  CHECK(grad_check(bil, v({3, 5}), 1e-6) <= 1e-5);

  CHECK_THROWS_AS(grad_check(bil, v({3, 5}), 0.0), InvalidInput);
}

TEST_CASE("affine printing mirrors evaluation order") {
  Expr a = Expr::affine({{0, -1.0}, {1, -1.0}}, 1.0);
  CHECK(to_string(a) == "(+ (* -1 x1) (* -1 x2) 1)");
  CHECK(to_infix(a, 0) == "-y1 - y2 + 1");
  CHECK(to_string(Expr::affine({{1, 1.0}}, 0.0)) == "(* 1 x2)");
  CHECK(to_string(Expr::affine({}, -4.0)) == "-4");
  CHECK(Expr::affine({{0, 0.0}}, 2.0).degree() == 0);
}

TEST_CASE("affine and quadratic form extraction") {
  Expr f = parse_expr("(+ (^ (+ x1 -1) 2) (* 3 x1 x2) x2 4)", 2);
  QuadraticForm q = quadratic_form(f, 2);
  // (x1-1)^2 + 3 x1 x2 + x2 + 4 = x1^2 + 3 x1 x2 - 2 x1 + x2 + 5
  CHECK(q.Q(0, 0) == doctest::Approx(2.0));
  CHECK(q.Q(0, 1) == doctest::Approx(3.0));
  CHECK(q.Q(1, 0) == doctest::Approx(3.0));
  CHECK(q.Q(1, 1) == doctest::Approx(0.0));
  CHECK(q.c[0] == doctest::Approx(-2.0));
  CHECK(q.c[1] == doctest::Approx(1.0));
  CHECK(q.d == doctest::Approx(5.0));
  CHECK_THROWS_AS(affine_form(f, 2), InvalidInput);
  CHECK_THROWS_AS(quadratic_form(parse_expr("(^ x1 3)", 1), 1), InvalidInput);

  AffineForm a = affine_form(parse_expr("(+ (* 2 x2) (neg x1) 7)", 2), 2);
  CHECK(a.a[0] == -1.0);
  CHECK(a.a[1] == 2.0);
  CHECK(a.b == 7.0);
}

TEST_CASE("fix_to_zero restricts to a support") {
  Expr g = parse_expr("(+ (neg x1) (^ x2 2))", 2);
  Expr restricted = fix_to_zero(g, {true, false});
  CHECK(restricted.degree() == 1);
  CHECK(eval(restricted, v({4, 100})) == -4.0);
  Expr aff = fix_to_zero(Expr::affine({{0, 1.0}, {1, 2.0}}, 0.0), {false, true});
  CHECK(to_string(aff) == "(* 2 x2)");
}

TEST_CASE("property: printed form re-parses to an identical evaluator") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 4);
    Expr e = testing::random_expr(rng, n, 4);
    Expr back = parse_expr(to_string(e), n);
    CHECK(to_string(back) == to_string(e));
    for (int k = 0; k < 100; ++k) {
      Vec x = rng.vector(n, -2, 2);
      CHECK(eval(back, x) == eval(e, x));
    }
  }
}

TEST_CASE("property: gradients match finite differences on random trees") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 4);
    Expr e = testing::random_expr(rng, n, 3);
    for (int k = 0; k < 20; ++k) {
      Vec x = rng.vector(n, -2, 2);
      double scale = 1.0 + grad(e, x).cwiseAbs().maxCoeff();
      CHECK(grad_check(e, x, 1e-6) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("property: gradient of a sum is the sum of gradients") {
  testing::Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 4);
    Expr a = testing::random_expr(rng, n, 4);
    Expr b = testing::random_expr(rng, n, 4);
    Expr s = Expr::sum({a, b});
    Vec x = rng.vector(n, -2, 2);
    Vec lhs = grad(s, x);
    Vec rhs = grad(a, x) + grad(b, x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("evaluation is deterministic") {
  testing::Rng rng(14);
  Expr e = testing::random_expr(rng, 3, 4);
  Vec x = rng.vector(3, -2, 2);
  double a = eval(e, x);
  double b = eval(e, x);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}
