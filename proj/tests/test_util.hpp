#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mpcac/expr.hpp"
#include "mpcac/model.hpp"

namespace mpcac::testing {

/// Deterministic uniform draws; independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin() { return (gen_() >> 63) != 0; }
  Vec vector(Index n, double lo, double hi) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

/// Builds a problem from prefix-form expression text.
inline Problem make_problem(const std::string& name, int n, int alpha, const std::string& f,
                            const std::vector<std::string>& g = {},
                            const std::vector<std::string>& h = {}) {
  std::vector<Expr> ge, he;
  for (const auto& s : g) ge.push_back(parse_expr(s, n));
  for (const auto& s : h) he.push_back(parse_expr(s, n));
  return Problem(name, n, alpha, parse_expr(f, n), std::move(ge), std::move(he));
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec r(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}

inline PairPoint pair(std::initializer_list<double> x, std::initializer_list<double> y) {
  return PairPoint{vec(x), vec(y)};
}

inline Expr random_expr(Rng& rng, int n, int depth) {
  if (depth == 0 || rng.integer(0, 4) == 0) {
    if (rng.coin()) return Expr::variable(rng.integer(0, n - 1));
    return Expr::constant(static_cast<double>(rng.integer(-3, 3)));
  }
  switch (rng.integer(0, 4)) {
    case 0: {
      std::vector<Expr> c;
      for (int k = rng.integer(1, 3); k > 0; --k) c.push_back(random_expr(rng, n, depth - 1));
      return Expr::sum(std::move(c));
    }
    case 1: {
      std::vector<Expr> c;
      for (int k = rng.integer(1, 3); k > 0; --k) c.push_back(random_expr(rng, n, depth - 1));
      return Expr::product(std::move(c));
    }
    case 2:
      return Expr::power(random_expr(rng, n, depth - 1), rng.integer(1, 3));
    case 3:
      return Expr::negate(random_expr(rng, n, depth - 1));
    default: {
      std::vector<Expr::Term> t;
      for (int i = 0; i < n; ++i)
        if (rng.coin()) t.push_back({i, static_cast<double>(rng.integer(-2, 2))});
      return Expr::affine(std::move(t), static_cast<double>(rng.integer(-2, 2)));
    }
  }
}

}  // namespace mpcac::testing
