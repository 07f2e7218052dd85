#include <algorithm>
#include <string>

#include "doctest.h"
#include "mpcac/error.hpp"
#include "mpcac/model.hpp"
#include "mpcac/stationarity.hpp"
#include "test_util.hpp"

using namespace mpcac;
using mpcac::testing::make_problem;
using mpcac::testing::pair;
using mpcac::testing::Rng;
using mpcac::testing::vec;

namespace {

// f = (x1 - 1)^2 + (x2 + 1)^2 without constraints.
Problem shifted_quadratic() {
  return make_problem("shifted", 2, 1, "(+ (^ (+ x1 -1) 2) (^ (+ x2 1) 2))");
}

// min x1 + x2 s.t. -x1 + x2^2 <= 0, ||x||_0 <= 1: the minimizer (0, 0) is not KKT.
Problem not_kkt() { return make_problem("not-kkt", 2, 1, "(+ x1 x2)", {"(+ (neg x1) (^ x2 2))"}); }

}  // namespace

TEST_CASE("S and KKT hold at a strictly complementary minimizer") {
  const Problem p = shifted_quadratic();
  const PairPoint pt = pair({1, 0}, {0, 1});
  const StationarityCertificate s = check_s_stationary(p, pt);
  CHECK(s.holds());
  CHECK(s.I == IndexList{1});
  REQUIRE(s.gamma.size() == 1);
  CHECK(s.gamma[0] == doctest::Approx(-2));
  CHECK(s.stationarity_residual <= 1e-9);
  CHECK(check_kkt_relaxed(p, pt).holds());
  CHECK(check_m_stationary(p, pt).holds());
}

TEST_CASE("S fails and M holds when I00 is nonempty") {
  const Problem p = shifted_quadratic();
  const PairPoint pt = pair({0, 0}, {1, 0});
  const StationarityCertificate s = check_s_stationary(p, pt);
  CHECK_FALSE(s.holds());
  CHECK(s.I == IndexList{0});
  CHECK(s.farkas.size() > 0);
  CHECK_FALSE(check_kkt_relaxed(p, pt).holds());
  const StationarityCertificate m = check_m_stationary(p, pt);
  CHECK(m.holds());
  CHECK(m.I == IndexList{0, 1});
}

TEST_CASE("a nonlinear constraint: the global minimizer is M- but not S-stationary") {
  const Problem p = not_kkt();
  const PairPoint pt = pair({0, 0}, {1, 0});
  CHECK_FALSE(check_kkt_relaxed(p, pt).holds());
  CHECK_FALSE(check_s_stationary(p, pt).holds());
  const StationarityCertificate m = check_m_stationary(p, pt);
  REQUIRE(m.holds());
  REQUIRE(m.lambda_g.size() == 1);
  CHECK(m.lambda_g[0] >= 0.0);
  // The canonical companion y = (1, 1) has I00 empty and S holds trivially.
  CHECK(check_s_stationary(p, pair({0, 0}, {1, 1})).holds());
}

TEST_CASE("W_I checks the index set") {
  const Problem p = shifted_quadratic();
  const PairPoint pt = pair({0, 0}, {1, 0});
  CHECK_FALSE(check_w_stationary(p, pt, {0}).holds());
  CHECK(check_w_stationary(p, pt, {0, 1}).holds());
  CHECK_THROWS_AS(check_w_stationary(p, pt, {1}), InvalidInput);
  CHECK_THROWS_AS(check_w_stationary(p, pair({1, 1}, {0, 0}), {}), InfeasiblePoint);
}

TEST_CASE("recovered full multipliers verify every item") {
  const Problem p = not_kkt();
  const PairPoint pt = pair({0, 0}, {1, 0});
  const StationarityCertificate full = recover_full_multipliers(check_m_stationary(p, pt), p, pt);
  REQUIRE(full.full.has_value());
  CHECK(*std::max_element(full.full->items.begin(), full.full->items.end()) <= 1e-7);
  CHECK_THROWS_AS(recover_full_multipliers(check_s_stationary(p, pt), p, pt), InvalidInput);

  const Problem q = shifted_quadratic();
  const PairPoint qt = pair({1, 0}, {0, 1});
  const StationarityCertificate kkt = recover_full_multipliers(check_kkt_relaxed(q, qt), q, qt);
  REQUIRE(kkt.full.has_value());
  CHECK(*std::max_element(kkt.full->items.begin(), kkt.full->items.end()) <= 1e-7);
}

TEST_CASE("W_I agrees with KKT of the I-tightened problem") {
  const Problem p = not_kkt();
  const PairPoint pt = pair({0, 0}, {1, 0});
  for (const IndexList& I : {IndexList{0}, IndexList{0, 1}}) {
    const bool w = check_w_stationary(p, pt, I).holds();
    CHECK(w == kkt_feasibility(build_tightened(p, pt, I), pt.stacked()).holds);
  }
}

TEST_CASE("relaxed KKT agrees with the direct multiplier system") {
  Rng rng(3);
  const Problem p = make_problem("lin", 3, 2, "(+ (^ (+ x1 -1) 2) (^ x2 2) (^ (+ x3 2) 2))",
                                 {"(+ x1 x2 x3 -1)"});
  for (int trial = 0; trial < 20; ++trial) {
    // x has one zero; y pairs with it.
    const int z = rng.integer(0, 2);
    Vec x = rng.vector(3, -1, 0.3);
    x[z] = 0;
    Vec y = Vec::Zero(3);
    y[z] = 1;
    const PairPoint pt{x, y};
    if (!is_feasible_relaxed(p, pt)) continue;
    const bool direct = kkt_feasibility(build_relaxed(p), pt.stacked()).holds;
    CHECK(direct == check_kkt_relaxed(p, pt).holds());
  }
}

TEST_CASE("stationarity profile lists minimal sets and is monotone") {
  const Problem p = shifted_quadratic();
  const StationarityProfile prof = stationarity_profile(p, pair({0, 0}, {1, 0}));
  CHECK(prof.i_min == IndexList{0});
  CHECK(prof.free == IndexList{1});
  REQUIRE(prof.entries.size() == 2);
  CHECK(prof.entries[0].verdict == Verdict::Fails);
  CHECK(prof.entries[1].verdict == Verdict::Holds);
  REQUIRE(prof.minimal.size() == 1);
  CHECK(prof.minimal[0] == IndexList{0, 1});
}

TEST_CASE("planted multipliers make W_I hold") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    // x = (0, 0, a), one active affine g through x, I = {1, 2}.
    // Values pass through text, so draw them at the precision they are written with.
    const auto exact = [](double v) { return std::stod(std::to_string(v)); };
    const double a = exact(rng.uniform(0.5, 2));
    const double lam = exact(rng.uniform(0, 2));
    const Vec gam = rng.vector(2, -1, 1).unaryExpr(exact);
    // g = x1 + x2 + x3 - a; grad f = -lam * (1, 1, 1) - (gam1, gam2, 0).
    const double c1 = -lam - gam[0], c2 = -lam - gam[1], c3 = -lam;
    const std::string f = "(+ (* " + std::to_string(c1) + " x1) (* " + std::to_string(c2) +
                          " x2) (* " + std::to_string(c3) + " x3))";
    const Problem p = make_problem("planted", 3, 1, f, {"(+ x1 x2 x3 " + std::to_string(-a) + ")"});
    const PairPoint pt{vec({0, 0, a}), vec({1, 1, 0})};
    const StationarityCertificate w = check_w_stationary(p, pt, {0, 1}, Tolerances{});
    CHECK(w.holds());
    CHECK(w.stationarity_residual <= 1e-6);
  }
}
