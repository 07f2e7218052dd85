#include "mpcac/cones.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include "mpcac/error.hpp"
#include "mpcac/linalg.hpp"
#include "mpcac/lp.hpp"

namespace mpcac {

namespace {

constexpr Index kMaxConeDim = 12;

Mat empty_rows(Index dim) { return Mat(0, dim); }

Mat from_rows(const std::vector<Vec>& rows, Index dim) {
  Mat out(static_cast<Index>(rows.size()), dim);
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = rows[k].transpose();
  return out;
}

Mat from_cols(const std::vector<Vec>& cols, Index dim) {
  Mat out(dim, static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = cols[k];
  return out;
}

// Unit max-norm with round-off flushed to zero.
Vec tidy(Vec v) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return v;
  v /= m;
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) < 1e-12) v[i] = 0.0;
  return v;
}

struct Ray {
  Vec d;
  std::vector<bool> tight;  // per processed row
};

}  // namespace

// ---------------------------------------------------------------------------

struct PolyhedralCone::Cache {
  std::once_flag once;
  Generators gens;
};

PolyhedralCone::PolyhedralCone(Index dim, Mat equalities, Mat inequalities)
    : dim_(dim), eq_(std::move(equalities)), ineq_(std::move(inequalities)),
      cache_(std::make_shared<Cache>()) {
  if (dim < 0) throw InvalidInput("cone dimension must be nonnegative");
  if (eq_.rows() == 0) eq_ = empty_rows(dim);
  if (ineq_.rows() == 0) ineq_ = empty_rows(dim);
  if (eq_.cols() != dim || ineq_.cols() != dim)
    throw InvalidInput("cone rows do not match the ambient dimension");
}

PolyhedralCone PolyhedralCone::full_space(Index dim) {
  return PolyhedralCone(dim, empty_rows(dim), empty_rows(dim));
}

bool PolyhedralCone::contains(const Eigen::Ref<const Vec>& d, double eps) const {
  if (d.size() != dim_) throw InvalidInput("direction dimension does not match the cone");
  const double dn = std::max(1.0, d.norm());
  for (Index k = 0; k < eq_.rows(); ++k)
    if (std::abs(eq_.row(k).dot(d)) > eps * dn * std::max(1.0, eq_.row(k).norm())) return false;
  for (Index k = 0; k < ineq_.rows(); ++k)
    if (ineq_.row(k).dot(d) > eps * dn * std::max(1.0, ineq_.row(k).norm())) return false;
  return true;
}

const Generators& PolyhedralCone::generators() const {
  std::call_once(cache_->once, [this] { cache_->gens = mpcac::generators(*this); });
  return cache_->gens;
}

// Double description: start from the whole space (lineality = identity) and
// intersect one halfspace at a time. Each equality enters as two inequalities.
Generators generators(const PolyhedralCone& c, double eps) {
  const Index dim = c.dim();
  if (dim > kMaxConeDim)
    throw CapExceeded("cone dimension " + std::to_string(dim) + " exceeds the cap of " +
                      std::to_string(kMaxConeDim));

  std::vector<Vec> rows;
  auto add = [&](const Eigen::Ref<const Vec>& r) {
    const double nr = r.norm();
    if (nr > eps) rows.push_back(r / nr);
  };
  for (Index k = 0; k < c.equalities().rows(); ++k) {
    add(c.equalities().row(k).transpose());
    add(-c.equalities().row(k).transpose());
  }
  for (Index k = 0; k < c.inequalities().rows(); ++k) add(c.inequalities().row(k).transpose());

  std::vector<Vec> lin;
  for (Index i = 0; i < dim; ++i) lin.push_back(Vec::Unit(dim, i));
  std::vector<Ray> rays;

  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Vec& a = rows[k];
    Index pivot = -1;
    double best = eps;
    for (std::size_t j = 0; j < lin.size(); ++j) {
      const double v = std::abs(a.dot(lin[j]));
      if (v > best) {
        best = v;
        pivot = static_cast<Index>(j);
      }
    }

    if (pivot >= 0) {
      // The row cuts the lineality space: one lineality direction turns into a ray.
      const Vec l0 = lin[pivot];
      const double s = a.dot(l0);
      std::vector<Vec> next;
      for (std::size_t j = 0; j < lin.size(); ++j) {
        if (static_cast<Index>(j) == pivot) continue;
        next.push_back(tidy(lin[j] - (a.dot(lin[j]) / s) * l0));
      }
      lin = std::move(next);
      for (Ray& r : rays) {
        r.d = tidy(r.d - (a.dot(r.d) / s) * l0);
        r.tight.push_back(true);
      }
      Ray r0{tidy(s > 0 ? Vec(-l0) : l0), std::vector<bool>(k, true)};
      r0.tight.push_back(false);
      rays.push_back(std::move(r0));
      continue;
    }

    std::vector<double> val(rays.size());
    for (std::size_t j = 0; j < rays.size(); ++j) val[j] = a.dot(rays[j].d);

    std::vector<Ray> next;
    for (std::size_t j = 0; j < rays.size(); ++j) {
      if (val[j] <= eps) {
        Ray r = rays[j];
        r.tight.push_back(std::abs(val[j]) <= eps);
        next.push_back(std::move(r));
      }
    }
    for (std::size_t p = 0; p < rays.size(); ++p) {
      if (val[p] <= eps) continue;
      for (std::size_t q = 0; q < rays.size(); ++q) {
        if (val[q] >= -eps) continue;
        // Combinatorial adjacency: no third ray is tight on every row where both are.
        std::vector<bool> common(k);
        for (std::size_t i = 0; i < k; ++i) common[i] = rays[p].tight[i] && rays[q].tight[i];
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == p || r == q) continue;
          bool covers = true;
          for (std::size_t i = 0; i < k && covers; ++i)
            if (common[i] && !rays[r].tight[i]) covers = false;
          if (covers) adjacent = false;
        }
        if (!adjacent) continue;
        Ray nr{tidy(val[p] * rays[q].d - val[q] * rays[p].d), common};
        nr.tight.push_back(true);
        next.push_back(std::move(nr));
      }
    }
    rays = std::move(next);
  }

  // Drop parallel duplicates and anything lying in the lineality space.
  std::vector<Vec> kept;
  const Mat L = from_cols(lin, dim);
  for (const Ray& r : rays) {
    Vec d = r.d;
    if (!lin.empty()) {
      const Vec coef = L.colPivHouseholderQr().solve(d);
      if ((L * coef - d).norm() <= 1e3 * eps) continue;
    }
    bool dup = false;
    for (const Vec& o : kept)
      if ((o - d).cwiseAbs().maxCoeff() <= 1e3 * eps) dup = true;
    if (!dup) kept.push_back(d);
  }

  Generators g;
  g.rays = from_cols(kept, dim);
  g.lineality = L;

  const double check = 1e3 * eps;
  for (const Vec& d : kept)
    if (!c.contains(d, check))
      throw InternalError("double description produced a ray outside its cone");
  for (const Vec& l : lin)
    if (!c.contains(l, check) || !c.contains(-l, check))
      throw InternalError("double description produced a lineality direction outside its cone");
  return g;
}

bool ConeUnion::contains(const Eigen::Ref<const Vec>& d, double eps) const {
  for (const PolyhedralCone& p : pieces)
    if (p.contains(d, eps)) return true;
  return false;
}

PolyhedralCone polar(const PolyhedralCone& c) {
  const Generators& g = c.generators();
  return PolyhedralCone(c.dim(), g.lineality.transpose(), g.rays.transpose());
}

PolyhedralCone polar_union(const ConeUnion& u) {
  Mat eq = empty_rows(u.dim);
  Mat ineq = empty_rows(u.dim);
  for (const PolyhedralCone& piece : u.pieces) {
    const Generators& g = piece.generators();
    eq = vstack(eq, g.lineality.transpose());
    ineq = vstack(ineq, g.rays.transpose());
  }
  return PolyhedralCone(u.dim, eq, ineq);
}

bool cone_includes(const PolyhedralCone& outer, const PolyhedralCone& inner, double eps) {
  if (outer.dim() != inner.dim()) throw InvalidInput("cones live in different dimensions");
  const Generators& g = inner.generators();
  for (Index j = 0; j < g.rays.cols(); ++j)
    if (!outer.contains(g.rays.col(j), eps)) return false;
  for (Index j = 0; j < g.lineality.cols(); ++j)
    if (!outer.contains(g.lineality.col(j), eps) || !outer.contains(-g.lineality.col(j), eps))
      return false;
  return true;
}

bool cones_equal(const PolyhedralCone& a, const PolyhedralCone& b, double eps) {
  return cone_includes(a, b, eps) && cone_includes(b, a, eps);
}

UnionComparison union_equals_cone(const ConeUnion& u, const PolyhedralCone& c, double eps,
                                  int samples) {
  UnionComparison out;
  for (std::size_t k = 0; k < u.pieces.size(); ++k) {
    const Generators& g = u.pieces[k].generators();
    std::vector<Vec> dirs;
    for (Index j = 0; j < g.rays.cols(); ++j) dirs.push_back(g.rays.col(j));
    for (Index j = 0; j < g.lineality.cols(); ++j) {
      dirs.push_back(g.lineality.col(j));
      dirs.push_back(-g.lineality.col(j));
    }
    for (const Vec& d : dirs) {
      if (!c.contains(d, eps)) {
        out.detail = "a generator of piece " + std::to_string(k + 1) + " leaves the cone";
        out.witness = d;
        return out;
      }
    }
  }

  const Generators& g = c.generators();
  std::vector<Vec> dirs;
  for (Index j = 0; j < g.rays.cols(); ++j) dirs.push_back(g.rays.col(j));
  for (Index j = 0; j < g.lineality.cols(); ++j) {
    dirs.push_back(g.lineality.col(j));
    dirs.push_back(-g.lineality.col(j));
  }
  for (const Vec& d : dirs) {
    if (!u.contains(d, eps)) {
      out.detail = "a generator of the cone lies in no piece";
      out.witness = d;
      return out;
    }
  }
  for (std::size_t k = 0; k < u.pieces.size(); ++k) {
    bool all = true;
    for (const Vec& d : dirs)
      if (!u.pieces[k].contains(d, eps)) {
        all = false;
        break;
      }
    if (all) {
      out.equal = true;
      out.detail = "piece " + std::to_string(k + 1) + " contains every generator of the cone";
      return out;
    }
  }

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vec d = Vec::Zero(c.dim());
    for (Index j = 0; j < g.rays.cols(); ++j) d += unit(rng) * g.rays.col(j);
    for (Index j = 0; j < g.lineality.cols(); ++j)
      d += (2.0 * unit(rng) - 1.0) * g.lineality.col(j);
    if (!u.contains(d, eps)) {
      out.detail = "a conic combination of generators lies in no piece";
      out.witness = tidy(d);
      return out;
    }
  }
  out.equal = true;
  out.sampled = true;
  out.detail = "generators covered; " + std::to_string(samples) +
               " sampled combinations all lie in the union";
  return out;
}

// ---------------------------------------------------------------------------

bool AffinePairSet::separable() const {
  auto check = [&](const Mat& M) {
    for (Index k = 0; k < M.rows(); ++k) {
      const bool on_x = M.row(k).head(n).cwiseAbs().maxCoeff() > 0.0;
      const bool on_y = M.row(k).tail(n).cwiseAbs().maxCoeff() > 0.0;
      if (on_x && on_y) return false;
    }
    return true;
  };
  return (n == 0) || (check(ineq) && check(eq));
}

AffinePairSet relaxed_pair_set(const Problem& p) {
  if (!p.constraints_affine())
    throw OutOfScope("the constraints g and h must be affine for a tangent cone decision");
  const int n = p.n();
  const Index nz = 2 * n;
  AffinePairSet s;
  s.n = n;
  std::vector<Vec> ineq, eq;
  std::vector<double> ineq_rhs, eq_rhs;
  for (int i = 0; i < p.m(); ++i) {
    const AffineForm a = affine_form(p.g()[i], n);
    Vec row = Vec::Zero(nz);
    row.head(n) = a.a;
    ineq.push_back(row);
    ineq_rhs.push_back(-a.b);
    s.ineq_labels.push_back("g" + std::to_string(i + 1));
  }
  {
    Vec row = Vec::Zero(nz);
    row.tail(n).setConstant(-1.0);
    ineq.push_back(row);
    ineq_rhs.push_back(-(n - p.alpha()));
    s.ineq_labels.push_back("theta");
  }
  for (int i = 0; i < n; ++i) {
    ineq.push_back(-Vec::Unit(nz, n + i));
    ineq_rhs.push_back(0.0);
    s.ineq_labels.push_back("H" + std::to_string(i + 1));
  }
  for (int i = 0; i < n; ++i) {
    ineq.push_back(Vec::Unit(nz, n + i));
    ineq_rhs.push_back(1.0);
    s.ineq_labels.push_back("Htilde" + std::to_string(i + 1));
  }
  for (int j = 0; j < p.p(); ++j) {
    const AffineForm a = affine_form(p.h()[j], n);
    Vec row = Vec::Zero(nz);
    row.head(n) = a.a;
    eq.push_back(row);
    eq_rhs.push_back(-a.b);
    s.eq_labels.push_back("h" + std::to_string(j + 1));
  }
  s.ineq = from_rows(ineq, nz);
  s.ineq_rhs = Eigen::Map<Vec>(ineq_rhs.data(), static_cast<Index>(ineq_rhs.size()));
  s.eq = from_rows(eq, nz);
  s.eq_rhs = Eigen::Map<Vec>(eq_rhs.data(), static_cast<Index>(eq_rhs.size()));
  return s;
}

namespace {

void require_in_set(const AffinePairSet& s, const PairPoint& pt, const Tolerances& tol) {
  if (!pt.y) throw InvalidInput("the point needs a y part");
  if (pt.x.size() != s.n || pt.y->size() != s.n)
    throw InvalidInput("point dimension does not match the set");
  const Vec z = pt.stacked();
  if (s.ineq.rows() > 0 && (s.ineq * z - s.ineq_rhs).maxCoeff() > tol.feas)
    throw InfeasiblePoint("the point violates an inequality of the set");
  if (s.eq.rows() > 0 && (s.eq * z - s.eq_rhs).cwiseAbs().maxCoeff() > tol.feas)
    throw InfeasiblePoint("the point violates an equality of the set");
  if ((pt.x.array() * pt.y->array()).abs().maxCoeff() > tol.feas)
    throw InfeasiblePoint("the point violates x * y = 0");
}

Mat active_rows(const AffinePairSet& s, const Vec& z, const Tolerances& tol) {
  std::vector<Vec> rows;
  for (Index k = 0; k < s.ineq.rows(); ++k)
    if (s.ineq.row(k).dot(z) - s.ineq_rhs[k] >= -tol.feas) rows.push_back(s.ineq.row(k).transpose());
  return from_rows(rows, z.size());
}

}  // namespace

PolyhedralCone linearized_cone(const AffinePairSet& s, const PairPoint& pt, const Tolerances& tol) {
  require_in_set(s, pt, tol);
  const Vec z = pt.stacked();
  const Index nz = z.size();
  std::vector<Vec> eq;
  for (Index k = 0; k < s.eq.rows(); ++k) eq.push_back(s.eq.row(k).transpose());
  for (int i = 0; i < s.n; ++i) {
    Vec row = Vec::Zero(nz);
    row[i] = (*pt.y)[i];
    row[s.n + i] = pt.x[i];
    if (row.cwiseAbs().maxCoeff() > 0.0) eq.push_back(row);
  }
  return PolyhedralCone(nz, from_rows(eq, nz), active_rows(s, z, tol));
}

PolyhedralCone linearized_cone(const ReformulatedProblem& rp, const Eigen::Ref<const Vec>& z,
                               const Tolerances& tol) {
  const Index nz = rp.num_vars();
  if (z.size() != nz) throw InvalidInput("point dimension does not match the reformulation");
  if (max_violation(rp, z) > tol.feas)
    throw InfeasiblePoint("the point is infeasible for the reformulation");
  std::vector<Vec> eq, ineq;
  for (const Constraint& c : rp.constraints) {
    if (c.sense == Sense::Equal) {
      eq.push_back(grad(c.expr, z));
    } else if (eval(c.expr, z) >= -tol.feas) {
      ineq.push_back(grad(c.expr, z));
    }
  }
  return PolyhedralCone(nz, from_rows(eq, nz), from_rows(ineq, nz));
}

ConeUnion tangent_cone_pieces(const AffinePairSet& s, const PairPoint& pt, int cap,
                              const Tolerances& tol) {
  require_in_set(s, pt, tol);
  const IndexSets sets = index_sets(pt, tol.zero);
  const int free = static_cast<int>(sets.i00.size());
  if (free > cap)
    throw CapExceeded("|I00| = " + std::to_string(free) + " exceeds the cap of " +
                      std::to_string(cap));
  const Vec z = pt.stacked();
  const Index nz = z.size();
  const Mat act = active_rows(s, z, tol);

  ConeUnion u;
  u.dim = nz;
  for (unsigned mask = 0; mask < (1u << free); ++mask) {
    std::vector<Vec> eq;
    for (Index k = 0; k < s.eq.rows(); ++k) eq.push_back(s.eq.row(k).transpose());
    IndexList zx = sets.i0pm, zy = sets.i_pm0;
    for (int b = 0; b < free; ++b) ((mask >> b) & 1u ? zx : zy).push_back(sets.i00[b]);
    std::sort(zx.begin(), zx.end());
    std::sort(zy.begin(), zy.end());
    for (int i : zx) eq.push_back(Vec::Unit(nz, i));
    for (int i : zy) eq.push_back(Vec::Unit(nz, s.n + i));
    u.pieces.emplace_back(nz, from_rows(eq, nz), act);
    u.labels.push_back("x=0 on " + format_indices(zx) + ", y=0 on " + format_indices(zy));
  }
  return u;
}

CqVerdict check_acq(const AffinePairSet& s, const PairPoint& pt, const Tolerances& tol) {
  const PolyhedralCone lin = linearized_cone(s, pt, tol);
  const ConeUnion tan = tangent_cone_pieces(s, pt, 12, tol);
  const UnionComparison cmp = union_equals_cone(tan, lin, tol.cone);
  CqVerdict v;
  v.holds = cmp.equal;
  v.exact = !cmp.sampled;
  v.detail = cmp.detail;
  return v;
}

CqVerdict check_gcq(const AffinePairSet& s, const PairPoint& pt, const Tolerances& tol) {
  const PolyhedralCone lin_polar = polar(linearized_cone(s, pt, tol));
  const PolyhedralCone tan_polar = polar_union(tangent_cone_pieces(s, pt, 12, tol));
  CqVerdict v;
  v.holds = cones_equal(tan_polar, lin_polar, tol.cone);
  v.detail = v.holds ? "polar cones coincide" : "the polar of the linearized cone is strictly smaller";
  return v;
}

CqVerdict check_acq(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  return check_acq(relaxed_pair_set(p), pt, tol);
}

CqVerdict check_gcq(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  return check_gcq(relaxed_pair_set(p), pt, tol);
}

namespace {

struct ActiveGradients {
  Mat eq;
  Mat ineq;
};

ActiveGradients relaxed_active(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  if (!is_feasible_relaxed(p, pt, tol))
    throw InfeasiblePoint("the point is infeasible for the relaxed problem");
  const PolyhedralCone c = linearized_cone(build_relaxed(p), pt.stacked(), tol);
  return {c.equalities(), c.inequalities()};
}

}  // namespace

CqVerdict check_licq(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  const ActiveGradients a = relaxed_active(p, pt, tol);
  const Mat all = vstack(a.eq, a.ineq);
  const Index rows = all.rows();
  const Index rank = numerical_rank(all, tol.rank_rel * std::max(max_row_norm(all), 1e-300));
  CqVerdict v;
  v.holds = rank == rows;
  std::ostringstream os;
  os << "rank " << rank << " of " << rows << " active gradients";
  v.detail = os.str();
  return v;
}

CqVerdict check_mfcq(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  const ActiveGradients a = relaxed_active(p, pt, tol);
  CqVerdict v;
  const Index me = a.eq.rows();
  const Index rank = numerical_rank(a.eq, tol.rank_rel * std::max(max_row_norm(a.eq), 1e-300));
  if (rank < me) {
    std::ostringstream os;
    os << "equality gradients have rank " << rank << " of " << me;
    v.detail = os.str();
    return v;
  }

  // max t  s.t.  E d = 0,  A d + t <= 0,  -1 <= d <= 1,  t <= 1.
  const Index nz = 2 * p.n();
  const Index mi = a.ineq.rows();
  LinearProgram lp;
  lp.c = Vec::Zero(nz + 1);
  lp.c[nz] = -1.0;
  lp.sign.assign(static_cast<std::size_t>(nz + 1), VarSign::Free);
  lp.A_eq = Mat::Zero(me, nz + 1);
  if (me > 0) lp.A_eq.leftCols(nz) = a.eq;
  lp.b_eq = Vec::Zero(me);
  lp.A_le = Mat::Zero(mi + 2 * nz + 1, nz + 1);
  lp.b_le = Vec::Zero(mi + 2 * nz + 1);
  if (mi > 0) {
    lp.A_le.topLeftCorner(mi, nz) = a.ineq;
    lp.A_le.block(0, nz, mi, 1).setOnes();
  }
  for (Index j = 0; j < nz; ++j) {
    lp.A_le(mi + 2 * j, j) = 1.0;
    lp.b_le[mi + 2 * j] = 1.0;
    lp.A_le(mi + 2 * j + 1, j) = -1.0;
    lp.b_le[mi + 2 * j + 1] = 1.0;
  }
  lp.A_le(mi + 2 * nz, nz) = 1.0;
  lp.b_le[mi + 2 * nz] = 1.0;

  LpOptions opts;
  opts.eps = tol.lp;
  const LpOutcome out = lp_solve(lp, opts);
  if (out.status != LpStatus::Optimal)
    throw InternalError("MFCQ margin program is not solvable");
  const double t = out.x[nz];
  v.holds = t > tol.lp;
  std::ostringstream os;
  os << "margin " << t << " over " << mi << " active inequalities";
  v.detail = os.str();
  return v;
}

}  // namespace mpcac
