#include <cmath>
#include <limits>

#include "doctest.h"
#include "mpcac/error.hpp"
#include "mpcac/lp.hpp"
#include "test_util.hpp"

using namespace mpcac;
using mpcac::testing::Rng;
using mpcac::testing::vec;

namespace {

LinearProgram inequality_lp(const Vec& c, const Mat& A, const Vec& b, VarSign sign) {
  LinearProgram lp;
  lp.c = c;
  lp.A_eq = Mat(0, c.size());
  lp.b_eq = Vec(0);
  lp.A_le = A;
  lp.b_le = b;
  lp.sign.assign(static_cast<std::size_t>(c.size()), sign);
  return lp;
}

// Minimum of c^T z over { A z <= b } in R^2 by checking every vertex.
double vertex_minimum(const Vec& c, const Mat& A, const Vec& b) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = i + 1; j < A.rows(); ++j) {
      Eigen::Matrix2d M;
      M << A.row(i), A.row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d z = M.inverse() * Eigen::Vector2d(b[i], b[j]);
      if (((A * z - b).array() > 1e-9).any()) continue;
      best = std::min(best, c.dot(z));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("two-variable LP with a known vertex") {
  // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (1.6, 1.2)
  Mat A(2, 2);
  A << 1, 2, 3, 1;
  const LpOutcome r = lp_solve(inequality_lp(vec({-1, -1}), A, vec({4, 6}), VarSign::NonNegative));
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));
  CHECK(r.objective == doctest::Approx(-2.8));
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("equality rows and free variables") {
  // min x1 s.t. x1 - x2 = -3, x2 >= 1, both free  ->  (-2, 1)
  LinearProgram lp;
  lp.c = vec({1, 0});
  lp.A_eq = Mat(1, 2);
  lp.A_eq << 1, -1;
  lp.b_eq = vec({-3});
  lp.A_le = Mat(1, 2);
  lp.A_le << 0, -1;
  lp.b_le = vec({-1});  // x2 >= 1
  lp.sign = {VarSign::Free, VarSign::Free};
  const LpOutcome r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(-2));
  CHECK(r.x[1] == doctest::Approx(1));
}

TEST_CASE("infeasible LP returns a verified Farkas certificate") {
  // x + y <= 1 and -x - y <= -2 with x, y >= 0
  Mat A(2, 2);
  A << 1, 1, -1, -1;
  const LinearProgram lp = inequality_lp(vec({0, 0}), A, vec({1, -2}), VarSign::NonNegative);
  const LpOutcome r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::Infeasible);
  REQUIRE(r.farkas.size() == 2);
  CHECK(verify_farkas(lp, r.farkas, 1e-9));
  CHECK(r.farkas.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("unbounded LP") {
  Mat A(1, 2);
  A << 1, -1;
  const LpOutcome r = lp_solve(inequality_lp(vec({-1, 0}), A, vec({1}), VarSign::NonNegative));
  CHECK(r.status == LpStatus::Unbounded);
}

TEST_CASE("degenerate LP that cycles under the textbook rule terminates") {
  // Beale's example; optimum -1.25 at x = (1, 0, 1, 0).
  Mat A(3, 4);
  A << 0.25, -8, -1, 9, 0.5, -12, -0.5, 3, 0, 0, 1, 0;
  const LpOutcome r =
      lp_solve(inequality_lp(vec({-0.75, 20, -0.5, 6}), A, vec({0, 0, 1}), VarSign::NonNegative));
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-1.25));
}

TEST_CASE("linear feasibility matches the full solver") {
  Mat A(1, 3);
  A << 1, 1, 1;
  const LpOutcome ok = linear_feasibility(A, vec({1}), std::vector<VarSign>(3, VarSign::NonNegative));
  CHECK(ok.status == LpStatus::Optimal);
  CHECK(ok.x.sum() == doctest::Approx(1));
  const LpOutcome bad = linear_feasibility(A, vec({-1}), std::vector<VarSign>(3, VarSign::NonNegative));
  CHECK(bad.status == LpStatus::Infeasible);
}

TEST_CASE("dimension mismatch is rejected") {
  LinearProgram lp = inequality_lp(vec({1, 1}), Mat::Ones(1, 2), vec({1}), VarSign::Free);
  lp.b_le = vec({1, 2});
  CHECK_THROWS_AS(lp_solve(lp), InvalidInput);
  lp.b_le = vec({std::nan("")});
  CHECK_THROWS_AS(lp_solve(lp), InvalidInput);
}

TEST_CASE("random bounded LPs agree with vertex enumeration") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = rng.integer(1, 5);
    Mat A(rows + 4, 2);
    Vec b(rows + 4);
    for (int i = 0; i < rows; ++i) {
      A.row(i) << rng.uniform(-1, 1), rng.uniform(-1, 1);
      b[i] = rng.uniform(-0.5, 2);
    }
    A.bottomRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
    b.tail(4).setConstant(3);
    const Vec c = rng.vector(2, -1, 1);
    const double expected = vertex_minimum(c, A, b);
    const LpOutcome r = lp_solve(inequality_lp(c, A, b, VarSign::Free));
    if (std::isinf(expected)) {
      CHECK(r.status == LpStatus::Infeasible);
      CHECK(verify_farkas(inequality_lp(c, A, b, VarSign::Free), r.farkas, 1e-7));
    } else {
      REQUIRE(r.status == LpStatus::Optimal);
      CHECK(r.objective == doctest::Approx(expected).epsilon(1e-7));
    }
  }
}
