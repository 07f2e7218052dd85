#include "mpcac/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mpcac/error.hpp"

namespace mpcac {

Problem::Problem(std::string name, int n, int alpha, Expr f, std::vector<Expr> g,
                 std::vector<Expr> h)
    : name_(std::move(name)),
      n_(n),
      alpha_(alpha),
      f_(std::move(f)),
      g_(std::move(g)),
      h_(std::move(h)) {
  if (n_ < 1) throw InvalidInput("dimension n must be positive");
  if (alpha_ <= 0) throw InvalidInput("cardinality bound alpha must be a positive integer");
  if (alpha_ >= n_)
    throw InvalidInput("cardinality bound must satisfy alpha < n (got alpha = " +
                       std::to_string(alpha_) + ", n = " + std::to_string(n_) +
                       "); otherwise the constraint has no effect");
  auto check = [&](const Expr& e, const std::string& what) {
    if (e.max_variable() >= n_)
      throw InvalidInput(what + " references x" + std::to_string(e.max_variable() + 1) +
                         " but n = " + std::to_string(n_));
  };
  check(f_, "objective");
  for (std::size_t i = 0; i < g_.size(); ++i) check(g_[i], "g" + std::to_string(i + 1));
  for (std::size_t i = 0; i < h_.size(); ++i) check(h_[i], "h" + std::to_string(i + 1));
}

bool Problem::constraints_affine() const {
  auto affine = [](const Expr& e) { return e.degree() <= 1; };
  return std::all_of(g_.begin(), g_.end(), affine) && std::all_of(h_.begin(), h_.end(), affine);
}

Vec PairPoint::stacked() const {
  if (!y) throw InvalidInput("pair point has no y component");
  if (y->size() != x.size()) throw InvalidInput("x and y dimensions differ");
  Vec z(2 * x.size());
  z << x, *y;
  return z;
}

IndexSets index_sets(const PairPoint& pt, double tau) {
  if (!pt.y) throw InvalidInput("index sets need the y component of the point");
  const Vec& x = pt.x;
  const Vec& y = *pt.y;
  if (y.size() != x.size()) throw InvalidInput("x and y dimensions differ");
  IndexSets s;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    const bool x0 = std::abs(x[i]) <= tau;
    const bool y0 = std::abs(y[i]) <= tau;
    const bool y1 = std::abs(y[i] - 1.0) <= tau;
    if (x0) {
      s.i0.push_back(i);
      if (y0) {
        s.i00.push_back(i);
      } else {
        s.i0pm.push_back(i);
        if (y[i] > tau) s.i0gt.push_back(i);
        if (y1)
          s.i01.push_back(i);
        else if (y[i] > tau && y[i] < 1.0)
          s.i0plus.push_back(i);
      }
    } else if (y0) {
      s.i_pm0.push_back(i);
    } else {
      throw InfeasiblePoint("x_" + std::to_string(i + 1) + " and y_" + std::to_string(i + 1) +
                            " are both nonzero");
    }
  }
  return s;
}

int cardinality(const Eigen::Ref<const Vec>& x, double tau) {
  return static_cast<int>((x.array().abs() > tau).count());
}

CompanionY companion_y(const Eigen::Ref<const Vec>& x, int alpha, double tau) {
  const int card = cardinality(x, tau);
  if (card > alpha)
    throw InfeasiblePoint("||x||_0 = " + std::to_string(card) + " exceeds alpha = " +
                          std::to_string(alpha));
  Vec y = (x.array().abs() <= tau).cast<double>();
  return {y, card == alpha};
}

namespace {

IndexList merged(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool sorted_unique(const IndexList& I) {
  return std::adjacent_find(I.begin(), I.end(), [](int a, int b) { return a >= b; }) == I.end();
}

}  // namespace

AdmissibleRange admissible_I_range(const PairPoint& pt, double tau) {
  IndexSets s = index_sets(pt, tau);
  return {merged(s.i0plus, s.i01), s.i0, s.i00};
}

void require_admissible(const PairPoint& pt, const IndexList& I, double tau) {
  if (!sorted_unique(I)) throw InvalidInput("index set I must be sorted without duplicates");
  AdmissibleRange r = admissible_I_range(pt, tau);
  if (!std::includes(I.begin(), I.end(), r.min.begin(), r.min.end()))
    throw InvalidInput("index set I = " + format_indices(I) + " must contain I_0+ U I_01 = " +
                       format_indices(r.min));
  if (!std::includes(r.max.begin(), r.max.end(), I.begin(), I.end()))
    throw InvalidInput("index set I = " + format_indices(I) + " must lie inside I_0 = " +
                       format_indices(r.max));
}

std::string Constraint::label() const {
  const std::string k = std::to_string(index + 1);
  switch (role) {
    case Role::G:
      return "g" + k;
    case Role::H:
      return "h" + k;
    case Role::Theta:
      return "theta";
    case Role::Xi:
      return "xi" + k;
    case Role::LowerY:
      return "H" + k;
    case Role::UpperY:
      return "Htilde" + k;
    case Role::FixX:
      return "G" + k;
  }
  return {};
}

namespace {

Expr theta_expr(int n, int alpha) {
  std::vector<Expr::Term> t;
  for (int i = 0; i < n; ++i) t.push_back({n + i, -1.0});
  return Expr::affine(std::move(t), static_cast<double>(n - alpha));
}

Expr lower_y(int n, int i) { return Expr::affine({{n + i, -1.0}}, 0.0); }
Expr upper_y(int n, int i) { return Expr::affine({{n + i, 1.0}}, -1.0); }
Expr fix_x(int i) { return Expr::affine({{i, 1.0}}, 0.0); }
Expr xi_expr(int n, int i) { return Expr::product({Expr::variable(i), Expr::variable(n + i)}); }

void push_original(const Problem& p, std::vector<Constraint>& out) {
  for (int i = 0; i < p.m(); ++i) out.push_back({Role::G, i, Sense::LessEqual, p.g()[i]});
  for (int i = 0; i < p.p(); ++i) out.push_back({Role::H, i, Sense::Equal, p.h()[i]});
  out.push_back({Role::Theta, 0, Sense::LessEqual, theta_expr(p.n(), p.alpha())});
}

}  // namespace

ReformulatedProblem build_relaxed(const Problem& p) {
  const int n = p.n();
  ReformulatedProblem rp{ReformKind::Relaxed, p, p.f(), {}, std::vector<bool>(2 * n, false),
                         std::nullopt, {}};
  push_original(p, rp.constraints);
  for (int i = 0; i < n; ++i) rp.constraints.push_back({Role::Xi, i, Sense::Equal, xi_expr(n, i)});
  for (int i = 0; i < n; ++i)
    rp.constraints.push_back({Role::LowerY, i, Sense::LessEqual, lower_y(n, i)});
  for (int i = 0; i < n; ++i)
    rp.constraints.push_back({Role::UpperY, i, Sense::LessEqual, upper_y(n, i)});
  return rp;
}

ReformulatedProblem build_mixed_integer(const Problem& p) {
  ReformulatedProblem rp = build_relaxed(p);
  rp.kind = ReformKind::MixedInteger;
  for (int i = 0; i < p.n(); ++i) rp.binary[p.n() + i] = true;
  return rp;
}

ReformulatedProblem relax_binaries(ReformulatedProblem rp) {
  std::fill(rp.binary.begin(), rp.binary.end(), false);
  if (rp.kind == ReformKind::MixedInteger) rp.kind = ReformKind::Relaxed;
  return rp;
}

ReformulatedProblem build_tightened(const Problem& p, const PairPoint& pt, const IndexList& I,
                                    const Tolerances& tol) {
  if (pt.x.size() != p.n() || !pt.y || pt.y->size() != p.n())
    throw InvalidInput("point dimensions do not match the problem");
  if (!is_feasible_relaxed(p, pt, tol))
    throw InfeasiblePoint("point is not feasible for the relaxed problem");
  require_admissible(pt, I, tol.zero);
  const IndexSets s = index_sets(pt, tol.zero);
  const int n = p.n();

  ReformulatedProblem rp{ReformKind::Tightened, p, p.f(), {}, std::vector<bool>(2 * n, false),
                         pt, I};
  push_original(p, rp.constraints);
  for (int i = 0; i < n; ++i)
    rp.constraints.push_back({Role::UpperY, i, Sense::LessEqual, upper_y(n, i)});
  for (int i : merged(s.i0plus, s.i01))
    rp.constraints.push_back({Role::LowerY, i, Sense::LessEqual, lower_y(n, i)});
  for (int i : merged(s.i00, s.i_pm0))
    rp.constraints.push_back({Role::LowerY, i, Sense::Equal, lower_y(n, i)});
  for (int i : I) rp.constraints.push_back({Role::FixX, i, Sense::Equal, fix_x(i)});
  return rp;
}

double max_violation(const ReformulatedProblem& rp, const Eigen::Ref<const Vec>& z) {
  if (z.size() != rp.num_vars()) throw InvalidInput("point dimension does not match 2n");
  double worst = 0.0;
  for (const auto& c : rp.constraints) {
    const double v = eval(c.expr, z);
    worst = std::max(worst, c.sense == Sense::Equal ? std::abs(v) : std::max(v, 0.0));
  }
  for (Index j = 0; j < z.size(); ++j)
    if (rp.binary[j]) worst = std::max(worst, std::min(std::abs(z[j]), std::abs(z[j] - 1.0)));
  return worst;
}

bool is_feasible_mpcac(const Problem& p, const Eigen::Ref<const Vec>& x, const Tolerances& tol) {
  if (x.size() != p.n()) throw InvalidInput("point dimension does not match n");
  for (const auto& g : p.g())
    if (eval(g, x) > tol.feas) return false;
  for (const auto& h : p.h())
    if (std::abs(eval(h, x)) > tol.feas) return false;
  return cardinality(x, tol.zero) <= p.alpha();
}

bool is_feasible_relaxed(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  if (pt.x.size() != p.n() || !pt.y || pt.y->size() != p.n())
    throw InvalidInput("point dimensions do not match the problem");
  return max_violation(build_relaxed(p), pt.stacked()) <= tol.feas;
}

std::string format_indices(const IndexList& I) {
  std::string s = "{";
  for (std::size_t k = 0; k < I.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(I[k] + 1);
  }
  return s + "}";
}

namespace {

std::string natural_form(const Constraint& c, int n, int alpha) {
  const std::string k = std::to_string(c.index + 1);
  switch (c.role) {
    case Role::G:
      return to_infix(c.expr, n) + " <= 0";
    case Role::H:
      return to_infix(c.expr, n) + " = 0";
    case Role::Theta: {
      std::string s;
      for (int i = 0; i < n; ++i) s += (i ? " + y" : "y") + std::to_string(i + 1);
      return s + " >= " + std::to_string(n - alpha);
    }
    case Role::Xi:
      return "x" + k + "*y" + k + " = 0";
    case Role::LowerY:
      return c.sense == Sense::Equal ? "y" + k + " = 0" : "y" + k + " >= 0";
    case Role::UpperY:
      return "y" + k + " <= 1";
    case Role::FixX:
      return "x" + k + " = 0";
  }
  return {};
}

}  // namespace

std::string format_reformulation(const ReformulatedProblem& rp) {
  const int n = rp.source.n();
  const int alpha = rp.source.alpha();
  std::ostringstream out;
  const char* kind = rp.kind == ReformKind::Relaxed        ? "relaxed"
                     : rp.kind == ReformKind::MixedInteger ? "mixed-integer"
                                                           : "tightened";
  out << "# " << kind << " reformulation of '" << rp.source.name() << "': n = " << n
      << ", alpha = " << alpha << ", variables (x, y) in R^" << n << " x R^" << n << "\n";
  if (rp.kind == ReformKind::Tightened) out << "# I = " << format_indices(rp.I) << "\n";

  std::vector<std::pair<std::string, std::string>> rows;
  const bool paired_bounds = rp.kind != ReformKind::Tightened;
  for (const auto& c : rp.constraints) {
    if (paired_bounds && (c.role == Role::LowerY || c.role == Role::UpperY)) continue;
    rows.emplace_back(natural_form(c, n, alpha), c.label());
  }
  if (paired_bounds) {
    for (int i = 0; i < n; ++i) {
      const std::string k = std::to_string(i + 1);
      if (rp.binary[n + i])
        rows.emplace_back("y" + k + " in {0, 1}", "H" + k + ", Htilde" + k + ", binary");
      else
        rows.emplace_back("0 <= y" + k + " <= 1", "H" + k + ", Htilde" + k);
    }
  }

  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  out << "minimize    " << to_infix(rp.objective, n) << "\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out << (k == 0 ? "subject to  " : "            ") << rows[k].first
        << std::string(width - rows[k].first.size() + 2, ' ') << "[" << rows[k].second << "]\n";
  }
  return out.str();
}

}  // namespace mpcac
