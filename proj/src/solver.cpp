#include "mpcac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mpcac/error.hpp"
#include "mpcac/linalg.hpp"
#include "mpcac/lp.hpp"

namespace mpcac {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::NotConverged:
      return "not-converged";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Unbounded:
      return "unbounded";
  }
  return "?";
}

namespace {

constexpr double kMultiplierCap = 1e10;
constexpr double kPenaltyCap = 1e10;

std::vector<bool> support_mask(int n, const IndexList& support) {
  std::vector<bool> keep(static_cast<std::size_t>(n), false);
  for (int i : support) keep[static_cast<std::size_t>(i)] = true;
  return keep;
}

void require_support(const Problem& p, const IndexList& support) {
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= p.n())
      throw InvalidInput("support index out of range");
    if (k > 0 && support[k] <= support[k - 1])
      throw InvalidInput("support must be sorted without duplicates");
  }
}

void restrict_to(Vec& v, const std::vector<bool>& keep) {
  for (Index i = 0; i < v.size(); ++i)
    if (!keep[static_cast<std::size_t>(i)]) v[i] = 0.0;
}

Vec eval_all(const std::vector<Expr>& es, const Vec& x) {
  Vec out(static_cast<Index>(es.size()));
  for (std::size_t k = 0; k < es.size(); ++k) out[static_cast<Index>(k)] = eval(es[k], x);
  return out;
}

double violation_of(const Problem& p, const Vec& x) {
  double v = 0.0;
  for (const Expr& g : p.g()) v = std::max(v, eval(g, x));
  for (const Expr& h : p.h()) v = std::max(v, std::abs(eval(h, x)));
  return v;
}

// max of reduced stationarity, feasibility and complementarity.
double reduced_kkt_residual(const Problem& p, const std::vector<bool>& keep, const Vec& x,
                            const Vec& lg, const Vec& lh) {
  Vec r = grad(p.f(), x);
  for (int i = 0; i < p.m(); ++i) r += lg[i] * grad(p.g()[i], x);
  for (int j = 0; j < p.p(); ++j) r += lh[j] * grad(p.h()[j], x);
  restrict_to(r, keep);
  double res = r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  res = std::max(res, violation_of(p, x));
  for (int i = 0; i < p.m(); ++i) res = std::max(res, std::abs(std::min(lg[i], -eval(p.g()[i], x))));
  return res;
}

struct AugmentedLagrangian {
  const Problem& p;
  const std::vector<bool>& keep;
  const Vec& lg;
  const Vec& lh;
  double rho;

  double value(const Vec& x) const {
    double v = eval(p.f(), x);
    for (int j = 0; j < p.p(); ++j) {
      const double t = eval(p.h()[j], x) + lh[j] / rho;
      v += 0.5 * rho * t * t;
    }
    for (int i = 0; i < p.m(); ++i) {
      const double t = std::max(0.0, eval(p.g()[i], x) + lg[i] / rho);
      v += 0.5 * rho * t * t;
    }
    return v;
  }

  Vec gradient(const Vec& x) const {
    Vec d = grad(p.f(), x);
    for (int j = 0; j < p.p(); ++j) d += (rho * eval(p.h()[j], x) + lh[j]) * grad(p.h()[j], x);
    for (int i = 0; i < p.m(); ++i) {
      const double w = std::max(0.0, rho * eval(p.g()[i], x) + lg[i]);
      if (w > 0.0) d += w * grad(p.g()[i], x);
    }
    restrict_to(d, keep);
    return d;
  }
};

// Gradient descent with a Barzilai-Borwein trial step and Armijo backtracking.
void minimize_inner(const AugmentedLagrangian& al, Vec& x, double eps, const SolveOptions& opts) {
  Vec g = al.gradient(x);
  double fx = al.value(x);
  Vec x_prev, g_prev;
  for (int it = 0; it < opts.max_inner; ++it) {
    const double gn2 = g.squaredNorm();
    if (g.cwiseAbs().maxCoeff() <= eps) return;
    double t = 1.0 / std::max(1.0, std::sqrt(gn2));
    if (it > 0) {
      const Vec s = x - x_prev;
      const Vec yv = g - g_prev;
      const double sy = s.dot(yv);
      if (sy > 0.0) t = s.squaredNorm() / sy;
    }
    bool accepted = false;
    Vec trial;
    double ft = 0.0;
    for (int k = 0; k < 80; ++k) {
      trial = x - t * g;
      ft = al.value(trial);
      if (std::isfinite(ft) && ft <= fx - opts.armijo * t * gn2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return;
    x_prev = x;
    g_prev = g;
    x = trial;
    fx = ft;
    g = al.gradient(x);
  }
}

// Gauss-Newton projection onto the violated constraints within the support.
void polish(const Problem& p, const std::vector<bool>& keep, const IndexList& support, Vec& x) {
  const Index k = static_cast<Index>(support.size());
  if (k == 0) return;
  double viol = violation_of(p, x);
  for (int it = 0; it < 200 && viol > 1e-20; ++it) {
    std::vector<double> c;
    std::vector<Vec> rows;
    for (const Expr& h : p.h()) {
      c.push_back(eval(h, x));
      rows.push_back(grad(h, x));
    }
    for (const Expr& g : p.g()) {
      const double v = eval(g, x);
      if (v > 0.0) {
        c.push_back(v);
        rows.push_back(grad(g, x));
      }
    }
    Mat J(static_cast<Index>(rows.size()), k);
    Vec cv(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (Index j = 0; j < k; ++j) J(static_cast<Index>(r), j) = rows[r][support[j]];
      cv[static_cast<Index>(r)] = c[r];
    }
    const Vec step = J.completeOrthogonalDecomposition().solve(-cv);
    Vec trial = x;
    for (Index j = 0; j < k; ++j) trial[support[j]] += step[j];
    restrict_to(trial, keep);
    const double tv = violation_of(p, trial);
    if (!(tv < viol)) break;
    x = trial;
    viol = tv;
  }
}

ReducedResult empty_support(const Problem& p, const SolveOptions& opts) {
  ReducedResult r;
  r.x = Vec::Zero(p.n());
  r.lambda_g = Vec::Zero(p.m());
  r.lambda_h = Vec::Zero(p.p());
  r.objective = eval(p.f(), r.x);
  r.violation = violation_of(p, r.x);
  r.kkt_residual = r.violation;
  r.status = r.violation <= opts.tol.feas ? SolveStatus::Converged : SolveStatus::Infeasible;
  return r;
}

// Deterministic uniform in [0, 1) from the raw engine output.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int rank_of(SolveStatus s, double violation, const Tolerances& tol) {
  if (s == SolveStatus::Converged) return 0;
  if (s == SolveStatus::NotConverged && violation <= tol.feas) return 1;
  return 2;
}

bool better(const ReducedResult& a, const ReducedResult& b, const Tolerances& tol) {
  const int ra = rank_of(a.status, a.violation, tol);
  const int rb = rank_of(b.status, b.violation, tol);
  if (ra != rb) return ra < rb;
  if (a.objective < b.objective - tol.tie) return true;
  if (a.objective > b.objective + tol.tie) return false;
  return a.kkt_residual < b.kkt_residual;
}

ReducedResult multi_start(const Problem& p, const IndexList& support, const SolveOptions& opts) {
  const int k = static_cast<int>(support.size());
  std::optional<ReducedResult> best;
  for (const Vec& s : start_points(k, opts.starts)) {
    Vec x0 = Vec::Zero(p.n());
    for (int j = 0; j < k; ++j) x0[support[j]] = s[j];
    ReducedResult r = solve_reduced(p, support, x0, opts);
    if (!best || better(r, *best, opts.tol)) best = std::move(r);
  }
  return *best;
}

long binomial_capped(int n, int k, long cap) {
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<long>(std::llround(c));
}

}  // namespace

std::vector<Vec> start_points(int k, int starts) {
  std::vector<Vec> out;
  for (int s = 1; s <= starts; ++s) {
    if (s == 1) {
      out.push_back(Vec::Zero(k));
    } else if (s == 2) {
      out.push_back(Vec::Constant(k, 0.5));
    } else if (s == 3) {
      out.push_back(Vec::Constant(k, -0.5));
    } else {
      std::mt19937_64 rng(static_cast<std::uint64_t>(s));
      Vec v(k);
      for (int j = 0; j < k; ++j) v[j] = 2.0 * unit_draw(rng) - 1.0;
      out.push_back(v);
    }
  }
  return out;
}

ReducedResult solve_reduced(const Problem& p, const IndexList& support,
                            const Eigen::Ref<const Vec>& start, const SolveOptions& opts) {
  require_support(p, support);
  if (start.size() != p.n()) throw InvalidInput("start point has the wrong dimension");
  const std::vector<bool> keep = support_mask(p.n(), support);
  for (Index i = 0; i < start.size(); ++i)
    if (!keep[static_cast<std::size_t>(i)] && start[i] != 0.0)
      throw InvalidInput("start point must vanish off the support");
  if (support.empty()) return empty_support(p, opts);

  ReducedResult r;
  Vec x = start;
  Vec lg = Vec::Zero(p.m());
  Vec lh = Vec::Zero(p.p());
  double rho = 10.0;
  double prev = std::numeric_limits<double>::infinity();
  r.status = SolveStatus::NotConverged;

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    r.outer_iterations = outer;
    const AugmentedLagrangian al{p, keep, lg, lh, rho};
    minimize_inner(al, x, std::max(1e-10, 0.1 * opts.kkt_tol), opts);

    const Vec gx = eval_all(p.g(), x);
    const Vec hx = eval_all(p.h(), x);
    double progress = 0.0;
    for (int i = 0; i < p.m(); ++i) progress = std::max(progress, std::abs(std::min(-gx[i], lg[i] / rho)));
    for (int j = 0; j < p.p(); ++j) progress = std::max(progress, std::abs(hx[j]));

    for (int i = 0; i < p.m(); ++i) lg[i] = std::clamp(lg[i] + rho * gx[i], 0.0, kMultiplierCap);
    for (int j = 0; j < p.p(); ++j) lh[j] = std::clamp(lh[j] + rho * hx[j], -kMultiplierCap, kMultiplierCap);

    const double viol = violation_of(p, x);
    if (viol <= opts.tol.feas && reduced_kkt_residual(p, keep, x, lg, lh) <= opts.kkt_tol) break;
    if (viol > 1e-4 && rho >= 1e8) {
      r.status = SolveStatus::Infeasible;
      break;
    }
    if (progress > 0.25 * prev) rho = std::min(10.0 * rho, kPenaltyCap);
    prev = progress;
  }

  if (r.status != SolveStatus::Infeasible) polish(p, keep, support, x);
  r.x = x;
  r.lambda_g = lg;
  r.lambda_h = lh;
  r.objective = eval(p.f(), x);
  r.violation = violation_of(p, x);
  r.kkt_residual = reduced_kkt_residual(p, keep, x, lg, lh);
  if (r.status != SolveStatus::Infeasible)
    r.status = (r.violation <= opts.tol.feas && r.kkt_residual <= opts.kkt_tol)
                   ? SolveStatus::Converged
                   : SolveStatus::NotConverged;
  return r;
}

bool is_affine_quadratic(const Problem& p, const IndexList& support) {
  const std::vector<bool> keep = support_mask(p.n(), support);
  if (fix_to_zero(p.f(), keep).degree() > 2) return false;
  for (const Expr& g : p.g())
    if (fix_to_zero(g, keep).degree() > 1) return false;
  for (const Expr& h : p.h())
    if (fix_to_zero(h, keep).degree() > 1) return false;
  return true;
}

QpResult solve_qp_affine(const Problem& p, const IndexList& support, const SolveOptions& opts) {
  require_support(p, support);
  if (!is_affine_quadratic(p, support))
    throw InvalidInput("reduced problem is not an affine-constrained quadratic");
  const int n = p.n();
  const Index k = static_cast<Index>(support.size());
  const std::vector<bool> keep = support_mask(n, support);

  QpResult out;
  out.lambda_g = Vec::Zero(p.m());
  out.lambda_h = Vec::Zero(p.p());
  auto finish = [&](const Vec& x) {
    out.x = x;
    out.objective = eval(p.f(), x);
    out.residual = reduced_kkt_residual(p, keep, x, out.lambda_g, out.lambda_h);
  };
  if (k == 0) {
    const ReducedResult r = empty_support(p, opts);
    finish(r.x);
    out.status = r.status;
    return out;
  }

  const QuadraticForm qf = quadratic_form(fix_to_zero(p.f(), keep), n);
  Mat Q(k, k);
  Vec c(k);
  for (Index a = 0; a < k; ++a) {
    c[a] = qf.c[support[a]];
    for (Index b = 0; b < k; ++b) Q(a, b) = qf.Q(support[a], support[b]);
  }
  auto affine_rows = [&](const std::vector<Expr>& es, Mat& A, Vec& b) {
    A.resize(static_cast<Index>(es.size()), k);
    b.resize(static_cast<Index>(es.size()));
    for (std::size_t r = 0; r < es.size(); ++r) {
      const AffineForm af = affine_form(fix_to_zero(es[r], keep), n);
      for (Index a = 0; a < k; ++a) A(static_cast<Index>(r), a) = af.a[support[a]];
      b[static_cast<Index>(r)] = af.b;
    }
  };
  Mat Ag, Ah;
  Vec bg, bh;
  affine_rows(p.g(), Ag, bg);
  affine_rows(p.h(), Ah, bh);
  const double scale = std::max({1.0, Q.size() ? Q.cwiseAbs().maxCoeff() : 0.0,
                                 Ag.size() ? Ag.cwiseAbs().maxCoeff() : 0.0,
                                 Ah.size() ? Ah.cwiseAbs().maxCoeff() : 0.0});
  const double lin_eps = 1e-10 * scale;

  auto embed = [&](const Vec& u) {
    Vec x = Vec::Zero(n);
    for (Index a = 0; a < k; ++a) x[support[a]] = u[a];
    return x;
  };
  auto fallback = [&]() {
    const ReducedResult r = multi_start(p, support, opts);
    out.fallback = true;
    out.lambda_g = r.lambda_g;
    out.lambda_h = r.lambda_h;
    finish(r.x);
    out.status = r.status;
    return out;
  };

  // Feasible starting point.
  LinearProgram lp;
  lp.c = Vec::Zero(k);
  lp.A_eq = Ah;
  lp.b_eq = -bh;
  lp.A_le = Ag;
  lp.b_le = -bg;
  lp.sign.assign(static_cast<std::size_t>(k), VarSign::Free);
  LpOptions lpo;
  lpo.eps = opts.tol.lp;
  const LpOutcome start = lp_solve(lp, lpo);
  if (start.status != LpStatus::Optimal) {
    out.status = SolveStatus::Infeasible;
    finish(Vec::Zero(n));
    return out;
  }
  Vec u = start.x;

  // Working set: independent equality rows, then active inequalities.
  std::vector<Index> eq_rows;
  std::vector<Index> work;
  auto working_matrix = [&]() {
    Mat W(static_cast<Index>(eq_rows.size() + work.size()), k);
    Index r = 0;
    for (Index j : eq_rows) W.row(r++) = Ah.row(j);
    for (Index i : work) W.row(r++) = Ag.row(i);
    return W;
  };
  auto independent_with = [&](const Eigen::Ref<const Vec>& row) {
    const Mat W = working_matrix();
    Mat ext(W.rows() + 1, k);
    if (W.rows() > 0) ext.topRows(W.rows()) = W;
    ext.row(W.rows()) = row.transpose();
    return numerical_rank(ext, lin_eps) == ext.rows();
  };
  for (Index j = 0; j < Ah.rows(); ++j)
    if (independent_with(Ah.row(j).transpose())) eq_rows.push_back(j);
  for (Index i = 0; i < Ag.rows(); ++i)
    if (Ag.row(i).dot(u) + bg[i] >= -1e-9 * scale && independent_with(Ag.row(i).transpose()))
      work.push_back(i);

  auto step_to_block = [&](const Vec& d, double tmax, Index& block) {
    double t = tmax;
    block = -1;
    for (Index i = 0; i < Ag.rows(); ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double ad = Ag.row(i).dot(d);
      if (ad <= 1e-14 * scale) continue;
      const double ti = std::max(0.0, -(Ag.row(i).dot(u) + bg[i]) / ad);
      if (ti < t) {
        t = ti;
        block = i;
      }
    }
    return t;
  };

  out.status = SolveStatus::NotConverged;
  for (int it = 0; it < 200; ++it) {
    out.iterations = it + 1;
    const Vec g = Q * u + c;
    const Mat W = working_matrix();
    const Mat Z = null_space(W, k, lin_eps);
    Vec d = Vec::Zero(k);
    if (Z.cols() > 0) {
      const Mat Hr = Z.transpose() * Q * Z;
      Eigen::SelfAdjointEigenSolver<Mat> es(Hr);
      const Vec& ev = es.eigenvalues();
      const double curv_eps = 1e-10 * scale;
      if (ev[0] < -curv_eps) return fallback();
      const Vec gr = Z.transpose() * g;
      Vec w = Vec::Zero(Z.cols());
      bool ray = false;
      for (Index j = 0; j < ev.size(); ++j) {
        const double proj = es.eigenvectors().col(j).dot(gr);
        if (ev[j] > curv_eps) {
          w -= (proj / ev[j]) * es.eigenvectors().col(j);
        } else if (std::abs(proj) > 1e-12 * scale) {
          w = -(proj > 0 ? 1.0 : -1.0) * es.eigenvectors().col(j);
          ray = true;
          break;
        }
      }
      d = Z * w;
      if (ray) {
        Index block = -1;
        const double t = step_to_block(d, std::numeric_limits<double>::infinity(), block);
        if (block < 0) {
          out.status = SolveStatus::Unbounded;
          finish(embed(u));
          return out;
        }
        u += t * d;
        work.push_back(block);
        continue;
      }
    }

    if (d.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + u.cwiseAbs().maxCoeff())) {
      // Stationary on the working set: check the inequality multipliers.
      Vec nu = Vec::Zero(W.rows());
      if (W.rows() > 0) nu = W.transpose().completeOrthogonalDecomposition().solve(-g);
      const Index ne = static_cast<Index>(eq_rows.size());
      Index drop = -1;
      double most = -1e-10 * scale;
      for (std::size_t j = 0; j < work.size(); ++j)
        if (nu[ne + static_cast<Index>(j)] < most) {
          most = nu[ne + static_cast<Index>(j)];
          drop = static_cast<Index>(j);
        }
      if (drop >= 0) {
        work.erase(work.begin() + drop);
        continue;
      }
      for (Index j = 0; j < ne; ++j) out.lambda_h[eq_rows[j]] = nu[j];
      for (std::size_t j = 0; j < work.size(); ++j)
        out.lambda_g[work[j]] = std::max(0.0, nu[ne + static_cast<Index>(j)]);
      finish(embed(u));
      out.status = out.residual <= opts.kkt_tol ? SolveStatus::Converged : SolveStatus::NotConverged;
      return out;
    }

    Index block = -1;
    const double t = step_to_block(d, 1.0, block);
    u += t * d;
    if (block >= 0) work.push_back(block);
  }
  finish(embed(u));
  return out;
}

SupportResult solve_support(const Problem& p, const IndexList& support, const SolveOptions& opts) {
  SupportResult s;
  s.support = support;
  if (is_affine_quadratic(p, support)) {
    const QpResult q = solve_qp_affine(p, support, opts);
    s.x = q.x;
    s.objective = q.objective;
    s.kkt_residual = q.residual;
    s.status = q.status;
    s.method = q.fallback ? "active-set+fallback" : "active-set";
    s.starts_used = q.fallback ? opts.starts : 1;
  } else {
    const ReducedResult r = multi_start(p, support, opts);
    s.x = r.x;
    s.objective = r.objective;
    s.kkt_residual = r.kkt_residual;
    s.status = r.status;
    s.method = "augmented-lagrangian";
    s.starts_used = opts.starts;
  }
  s.violation = violation_of(p, s.x);
  return s;
}

namespace {

// Index of the winning entry under the documented selection rule, or -1.
template <typename Entry>
long select_winner(const std::vector<Entry>& entries, const Tolerances& tol, bool& only_feasible) {
  for (int group = 0; group < 2; ++group) {
    double best = std::numeric_limits<double>::infinity();
    for (const Entry& e : entries)
      if (rank_of(e.status, e.violation, tol) == group) best = std::min(best, e.objective);
    if (!std::isfinite(best)) continue;
    only_feasible = group == 1;
    for (std::size_t k = 0; k < entries.size(); ++k)
      if (rank_of(entries[k].status, entries[k].violation, tol) == group &&
          entries[k].objective <= best + tol.tie)
        return static_cast<long>(k);
  }
  return -1;
}

}  // namespace

SolveReport solve_brute(const Problem& p, const SolveOptions& opts) {
  const int n = p.n();
  const int a = p.alpha();
  if (binomial_capped(n, a, opts.max_supports) > opts.max_supports)
    throw CapExceeded("C(" + std::to_string(n) + ", " + std::to_string(a) +
                      ") supports exceed the enumeration budget of " +
                      std::to_string(opts.max_supports));

  SolveReport rep;
  IndexList sup(static_cast<std::size_t>(a));
  for (int i = 0; i < a; ++i) sup[i] = i;
  for (;;) {
    rep.table.push_back(solve_support(p, sup, opts));
    int i = a - 1;
    while (i >= 0 && sup[i] == n - a + i) --i;
    if (i < 0) break;
    ++sup[i];
    for (int j = i + 1; j < a; ++j) sup[j] = sup[j - 1] + 1;
  }

  bool only_feasible = false;
  const long w = select_winner(rep.table, opts.tol, only_feasible);
  rep.certified_global = true;
  for (const SupportResult& s : rep.table)
    if (s.method != "active-set" ||
        (s.status != SolveStatus::Converged && s.status != SolveStatus::Infeasible))
      rep.certified_global = false;
  if (w < 0) return rep;

  const SupportResult& win = rep.table[static_cast<std::size_t>(w)];
  rep.found = true;
  rep.best_found_only = only_feasible;
  rep.x = win.x;
  rep.objective = win.objective;
  rep.support = win.support;
  rep.companion_y = companion_y(win.x, a, opts.tol.zero).y;
  const int group = rank_of(win.status, win.violation, opts.tol);
  for (const SupportResult& s : rep.table)
    if (rank_of(s.status, s.violation, opts.tol) == group &&
        std::abs(s.objective - win.objective) <= opts.tol.tie)
      rep.ties.push_back(s.support);
  return rep;
}

MixedIntegerReport solve_mixed_integer_enumeration(const Problem& p, const SolveOptions& opts) {
  const int n = p.n();
  if (n > 20) throw CapExceeded("binary enumeration is limited to n <= 20");
  std::vector<SupportResult> entries;
  std::vector<Vec> ys;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    Vec y(n);
    IndexList support;
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      // y_1 is the most significant bit, so masks run in lexicographic order.
      const bool one = (mask >> (n - 1 - i)) & 1ul;
      y[i] = one ? 1.0 : 0.0;
      ones += one;
      if (!one) support.push_back(i);
    }
    if (ones < n - p.alpha()) continue;
    entries.push_back(solve_support(p, support, opts));
    ys.push_back(y);
  }
  MixedIntegerReport rep;
  rep.assignments = static_cast<int>(entries.size());
  bool only_feasible = false;
  const long w = select_winner(entries, opts.tol, only_feasible);
  if (w < 0) return rep;
  rep.found = true;
  rep.objective = entries[static_cast<std::size_t>(w)].objective;
  rep.x = entries[static_cast<std::size_t>(w)].x;
  rep.y = ys[static_cast<std::size_t>(w)];
  return rep;
}

// ---------------------------------------------------------------------------

MpcacDiagnostic kkt_residual_mpcac_report(const Problem& p, const Eigen::Ref<const Vec>& x,
                                          const Tolerances& tol) {
  if (x.size() != p.n()) throw InvalidInput("point dimension does not match the problem");
  if (!is_feasible_mpcac(p, x, tol)) throw InfeasiblePoint("x is not feasible for the MPCaC");
  const int n = p.n();

  MpcacDiagnostic d;
  d.x = x;
  d.objective = eval(p.f(), x);
  d.cardinality = cardinality(x, tol.zero);
  const CompanionY cy = companion_y(x, p.alpha(), tol.zero);
  d.companion_y = cy.y;
  d.companion_unique = cy.unique;

  IndexList zeros;
  for (int i = 0; i < n; ++i)
    if (std::abs(x[i]) <= tol.zero) zeros.push_back(i);

  std::vector<Vec> ys;
  if (zeros.size() > 8) {
    ys.push_back(cy.y);
  } else {
    const int z = static_cast<int>(zeros.size());
    for (unsigned mask = 0; mask < (1u << z); ++mask) {
      Vec y = Vec::Zero(n);
      for (int b = 0; b < z; ++b)
        if ((mask >> (z - 1 - b)) & 1u) y[zeros[b]] = 1.0;
      if (y.sum() >= n - p.alpha() - tol.feas) ys.push_back(y);
    }
  }

  for (const Vec& y : ys) {
    PairDiagnostic pd;
    pd.y = y;
    pd.canonical = (y - cy.y).cwiseAbs().maxCoeff() == 0.0;
    const PairPoint pt{x, y};
    pd.sets = index_sets(pt, tol.zero);
    pd.profile = stationarity_profile(p, pt, 12, tol);
    pd.kkt = check_kkt_relaxed(p, pt, tol);
    pd.s = check_s_stationary(p, pt, tol);
    pd.m = check_m_stationary(p, pt, tol);
    pd.licq = check_licq(p, pt, tol);
    pd.mfcq = check_mfcq(p, pt, tol);
    if (!p.constraints_affine()) {
      pd.cq_note = "ACQ and GCQ are decided only for affine g and h";
    } else if (2 * n > 12) {
      pd.cq_note = "ACQ and GCQ are decided only for 2n <= 12";
    } else {
      pd.acq = check_acq(p, pt, tol);
      pd.gcq = check_gcq(p, pt, tol);
    }
    d.pairs.push_back(std::move(pd));
  }
  return d;
}

}  // namespace mpcac
