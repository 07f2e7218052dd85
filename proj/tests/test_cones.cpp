#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mpcac/cones.hpp"
#include "mpcac/error.hpp"
#include "test_util.hpp"

using namespace mpcac;
using mpcac::testing::make_problem;
using mpcac::testing::pair;
using mpcac::testing::Rng;
using mpcac::testing::vec;

namespace {

Vec unit_max(Vec v) { return v / v.cwiseAbs().maxCoeff(); }

bool has_column(const Mat& M, const Vec& v, double eps = 1e-9) {
  for (Index j = 0; j < M.cols(); ++j)
    if ((M.col(j) - v).cwiseAbs().maxCoeff() <= eps) return true;
  return false;
}

// Extreme rays of a pointed cone { A d <= 0 } in R^3 by intersecting row pairs.
std::vector<Vec> brute_rays3(const Mat& A) {
  std::vector<Vec> rays;
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = i + 1; j < A.rows(); ++j) {
      const Eigen::Vector3d a = A.row(i).transpose(), b = A.row(j).transpose();
      const Eigen::Vector3d c = a.cross(b);
      if (c.norm() < 1e-9) continue;
      for (const double sign : {1.0, -1.0}) {
        const Vec d = unit_max(sign * c);
        if (((A * d).array() > 1e-9).any()) continue;
        if (std::none_of(rays.begin(), rays.end(),
                         [&](const Vec& r) { return (r - d).cwiseAbs().maxCoeff() < 1e-7; }))
          rays.push_back(d);
      }
    }
  }
  return rays;
}

// The pair set { x >= 0, y >= 0, y <= x } used for a GCQ failure.
AffinePairSet coupled_set() {
  AffinePairSet s;
  s.n = 1;
  s.ineq = Mat(3, 2);
  s.ineq << -1, 0, 0, -1, -1, 1;
  s.ineq_rhs = Vec::Zero(3);
  s.eq = Mat(0, 2);
  s.eq_rhs = Vec(0);
  s.ineq_labels = {"x>=0", "y>=0", "y<=x"};
  return s;
}

}  // namespace

TEST_CASE("nonnegative orthant has the unit vectors as rays") {
  const PolyhedralCone c(3, Mat(0, 3), -Mat::Identity(3, 3));
  const Generators& g = c.generators();
  CHECK(g.rays.cols() == 3);
  CHECK(g.lineality.cols() == 0);
  for (int i = 0; i < 3; ++i) CHECK(has_column(g.rays, Vec::Unit(3, i)));
}

TEST_CASE("halfspace and full space carry lineality") {
  Mat A(1, 2);
  A << 0, -1;
  const Generators& h = PolyhedralCone(2, Mat(0, 2), A).generators();
  CHECK(h.rays.cols() == 1);
  CHECK(h.lineality.cols() == 1);
  CHECK(has_column(h.rays, vec({0, 1})));
  const Generators& f = PolyhedralCone::full_space(2).generators();
  CHECK(f.rays.cols() == 0);
  CHECK(f.lineality.cols() == 2);
}

TEST_CASE("equalities reduce dimension") {
  Mat E(1, 3);
  E << 1, 1, 1;
  const PolyhedralCone c(3, E, -Mat::Identity(3, 3));
  CHECK(c.generators().rays.cols() == 0);
  CHECK(c.generators().lineality.cols() == 0);
  CHECK(c.contains(Vec::Zero(3)));
  CHECK_FALSE(c.contains(vec({1, 0, 0})));
}

TEST_CASE("polar of the orthant is the nonpositive orthant") {
  const PolyhedralCone c(2, Mat(0, 2), -Mat::Identity(2, 2));
  const PolyhedralCone p = polar(c);
  CHECK(p.contains(vec({-1, -2})));
  CHECK_FALSE(p.contains(vec({1, -2})));
  CHECK(cones_equal(p, PolyhedralCone(2, Mat(0, 2), Mat::Identity(2, 2))));
}

TEST_CASE("double description matches brute-force rays in R^3") {
  Rng rng(5);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = rng.integer(3, 7);
    Mat A(rows, 3);
    for (int i = 0; i < rows; ++i) A.row(i) = rng.vector(3, -1, 1).transpose();
    if (A.fullPivLu().rank() < 3) continue;
    const Generators g = generators(PolyhedralCone(3, Mat(0, 3), A));
    REQUIRE(g.lineality.cols() == 0);
    const std::vector<Vec> expected = brute_rays3(A);
    CHECK(static_cast<std::size_t>(g.rays.cols()) == expected.size());
    for (const Vec& r : expected) CHECK(has_column(g.rays, r, 1e-7));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("bipolar of random cones") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = rng.integer(2, 5);
    const int rows = rng.integer(1, 6);
    Mat A(rows, dim);
    for (int i = 0; i < rows; ++i) A.row(i) = rng.vector(dim, -1, 1).transpose();
    Mat E(rng.integer(0, 1), dim);
    if (E.rows()) E.row(0) = rng.vector(dim, -1, 1).transpose();
    const PolyhedralCone c(dim, E, A);
    CHECK(cones_equal(c, polar(polar(c))));
    const Generators& g = c.generators();
    for (Index j = 0; j < g.rays.cols(); ++j) CHECK(c.contains(g.rays.col(j)));
    for (Index j = 0; j < g.lineality.cols(); ++j) {
      CHECK(c.contains(g.lineality.col(j)));
      CHECK(c.contains(-g.lineality.col(j)));
    }
  }
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(generators(PolyhedralCone::full_space(13)), CapExceeded);
  CHECK_NOTHROW(generators(PolyhedralCone::full_space(12)));
}

TEST_CASE("union comparison") {
  // Quadrant union {d1 >= 0, d2 = 0} U {d1 = 0, d2 >= 0} versus the quadrant.
  Mat e1(1, 2), e2(1, 2);
  e1 << 0, 1;
  e2 << 1, 0;
  ConeUnion u;
  u.dim = 2;
  u.pieces = {PolyhedralCone(2, e1, -Mat::Identity(2, 2)), PolyhedralCone(2, e2, -Mat::Identity(2, 2))};
  u.labels = {"a", "b"};
  const PolyhedralCone quadrant(2, Mat(0, 2), -Mat::Identity(2, 2));
  const UnionComparison cmp = union_equals_cone(u, quadrant);
  CHECK_FALSE(cmp.equal);
  REQUIRE(cmp.witness.size() == 2);
  CHECK(quadrant.contains(cmp.witness));
  CHECK_FALSE(u.contains(cmp.witness));
  CHECK(cones_equal(polar_union(u), polar(quadrant)));

  ConeUnion whole;
  whole.dim = 2;
  whole.pieces = {quadrant};
  whole.labels = {"q"};
  CHECK(union_equals_cone(whole, quadrant).equal);
}

TEST_CASE("linearized and tangent cones of a coupled pair set") {
  const AffinePairSet s = coupled_set();
  CHECK_FALSE(s.separable());
  const PairPoint origin = pair({0}, {0});
  const PolyhedralCone lin = linearized_cone(s, origin);
  const Generators& g = lin.generators();
  CHECK(g.rays.cols() == 2);
  CHECK(has_column(g.rays, vec({1, 0})));
  CHECK(has_column(g.rays, vec({1, 1})));
  const ConeUnion t = tangent_cone_pieces(s, origin);
  CHECK(t.contains(vec({1, 0})));
  CHECK_FALSE(t.contains(vec({1, 1})));
  CHECK_FALSE(check_acq(s, origin).holds);
  CHECK_FALSE(check_gcq(s, origin).holds);
}

TEST_CASE("relaxed pair set of an affine problem") {
  const Problem p = make_problem("aff", 2, 1, "(^ x1 2)", {"(+ x1 x2 -1)"});
  const AffinePairSet s = relaxed_pair_set(p);
  CHECK(s.n == 2);
  CHECK(s.ineq.cols() == 4);
  CHECK(s.ineq.rows() == 1 + 1 + 2 + 2);
  CHECK(s.separable());
  CHECK_THROWS_AS(relaxed_pair_set(make_problem("nl", 2, 1, "x1", {"(^ x1 2)"})), OutOfScope);
}

TEST_CASE("the constraint qualification chain on unconstrained problems") {
  const Problem p = make_problem("free", 2, 1, "(+ (^ (+ x1 -1) 2) (^ x2 2))");
  // I00 empty: ACQ holds; I00 nonempty: ACQ fails, GCQ holds.
  CHECK(check_acq(p, pair({1, 0}, {0, 1})).holds);
  CHECK_FALSE(check_acq(p, pair({0, 0}, {0, 1})).holds);
  CHECK(check_gcq(p, pair({0, 0}, {0, 1})).holds);
  for (const PairPoint& pt : {pair({1, 0}, {0, 1}), pair({0, 0}, {0, 1}), pair({0, 0}, {1, 1})}) {
    const bool licq = check_licq(p, pt).holds, mfcq = check_mfcq(p, pt).holds;
    const bool acq = check_acq(p, pt).holds, gcq = check_gcq(p, pt).holds;
    CHECK((!licq || mfcq));
    CHECK((!mfcq || acq));
    CHECK((!acq || gcq));
  }
}
