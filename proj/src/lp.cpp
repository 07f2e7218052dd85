#include "mpcac/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "mpcac/error.hpp"

namespace mpcac {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "?";
}

namespace {

std::ostream* g_default_trace = nullptr;

}  // namespace

void set_default_lp_trace(std::ostream* out) { g_default_trace = out; }
std::ostream* default_lp_trace() { return g_default_trace; }

namespace {

void validate(const LinearProgram& lp) {
  const Index nv = lp.num_vars();
  if (static_cast<Index>(lp.sign.size()) != nv)
    throw InvalidInput("sign restrictions do not match the number of variables");
  if (lp.A_eq.rows() != lp.b_eq.size() || (lp.A_eq.rows() > 0 && lp.A_eq.cols() != nv))
    throw InvalidInput("equality block has inconsistent dimensions");
  if (lp.A_le.rows() != lp.b_le.size() || (lp.A_le.rows() > 0 && lp.A_le.cols() != nv))
    throw InvalidInput("inequality block has inconsistent dimensions");
  auto finite = [](const auto& m) { return m.size() == 0 || m.allFinite(); };
  if (!finite(lp.c) || !finite(lp.A_eq) || !finite(lp.b_eq) || !finite(lp.A_le) ||
      !finite(lp.b_le))
    throw InvalidInput("linear program contains non-finite data");
}

double data_scale(const LinearProgram& lp) {
  double s = 1.0;
  auto upd = [&](const auto& m) {
    if (m.size() > 0) s = std::max(s, m.cwiseAbs().maxCoeff());
  };
  upd(lp.A_eq);
  upd(lp.b_eq);
  upd(lp.A_le);
  upd(lp.b_le);
  return s;
}

// Standard form { A v = b, v >= 0 } with b >= 0 plus one artificial per row.
// Column layout: [structural (x+ per var, x- per free var), slacks, artificials].
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& opts) : lp_(lp), opts_(opts) {
    nv_ = lp.num_vars();
    meq_ = lp.A_eq.rows();
    mle_ = lp.A_le.rows();
    rows_ = meq_ + mle_;
    for (Index j = 0; j < nv_; ++j) {
      plus_.push_back(ncols_++);
      minus_.push_back(lp.sign[j] == VarSign::Free ? ncols_++ : -1);
    }
    slack0_ = ncols_;
    ncols_ += mle_;
    art0_ = ncols_;
    ncols_ += rows_;
    rhs_ = ncols_;

    T_ = Mat::Zero(rows_ + 1, ncols_ + 1);
    flip_ = Vec::Ones(rows_);
    for (Index k = 0; k < rows_; ++k) {
      const bool eq = k < meq_;
      const auto row = eq ? lp.A_eq.row(k) : lp.A_le.row(k - meq_);
      const double b = eq ? lp.b_eq[k] : lp.b_le[k - meq_];
      for (Index j = 0; j < nv_; ++j) {
        T_(k, plus_[j]) = row[j];
        if (minus_[j] >= 0) T_(k, minus_[j]) = -row[j];
      }
      if (!eq) T_(k, slack0_ + (k - meq_)) = 1.0;
      T_(k, rhs_) = b;
      if (b < 0) {
        T_.row(k).head(art0_) *= -1.0;
        T_(k, rhs_) = -b;
        flip_[k] = -1.0;
      }
      T_(k, art0_ + k) = 1.0;
    }
    basis_.resize(rows_);
    for (Index k = 0; k < rows_; ++k) basis_[k] = art0_ + k;
    active_.assign(rows_, true);
  }

  LpOutcome solve() {
    LpOutcome out;
    const double scale = data_scale(lp_);

    // Phase 1: minimize the sum of artificials.
    Vec c1 = Vec::Zero(ncols_);
    c1.segment(art0_, rows_).setOnes();
    set_objective(c1);
    trace("phase 1 start");
    run(/*allow_artificial=*/true, out.pivots);  // bounded below by 0, never unbounded
    const double infeas = -T_(rows_, rhs_);
    if (infeas > opts_.eps * scale) {
      out.status = LpStatus::Infeasible;
      Vec w(rows_);
      for (Index k = 0; k < rows_; ++k) w[k] = flip_[k] * (1.0 - T_(rows_, art0_ + k));
      const double norm = w.cwiseAbs().maxCoeff();
      if (norm > 0) w /= norm;
      if (!verify_farkas(lp_, w, opts_.eps))
        throw InternalError("simplex produced a Farkas certificate that does not verify");
      out.farkas = w;
      return out;
    }

    drive_out_artificials(out.pivots);

    // Phase 2 on the original costs.
    Vec c2 = Vec::Zero(ncols_);
    for (Index j = 0; j < nv_; ++j) {
      c2[plus_[j]] = lp_.c[j];
      if (minus_[j] >= 0) c2[minus_[j]] = -lp_.c[j];
    }
    set_objective(c2);
    trace("phase 2 start");
    if (!run(/*allow_artificial=*/false, out.pivots)) {
      out.status = LpStatus::Unbounded;
      return out;
    }

    Vec v = Vec::Zero(ncols_);
    for (Index k = 0; k < rows_; ++k)
      if (active_[k]) v[basis_[k]] = T_(k, rhs_);
    out.x.resize(nv_);
    for (Index j = 0; j < nv_; ++j) out.x[j] = v[plus_[j]] - (minus_[j] >= 0 ? v[minus_[j]] : 0.0);
    out.status = LpStatus::Optimal;
    out.objective = nv_ > 0 ? lp_.c.dot(out.x) : 0.0;
    out.residual = primal_residual(out.x);

    const double tableau_obj = -T_(rows_, rhs_);
    const double audit_tol = 1e3 * opts_.eps * scale * (1.0 + std::abs(out.objective));
    if (std::abs(tableau_obj - out.objective) > audit_tol)
      throw InternalError("simplex objective disagrees with c^T x");
    if (out.residual > audit_tol)
      throw InternalError("simplex returned a point violating its constraints by " +
                          std::to_string(out.residual));
    return out;
  }

 private:
  void set_objective(const Vec& c) {
    cost_ = c;
    T_.row(rows_).setZero();
    T_.row(rows_).head(ncols_) = c.transpose();
    for (Index k = 0; k < rows_; ++k)
      if (active_[k]) T_.row(rows_) -= c[basis_[k]] * T_.row(k);
  }

  void pivot(Index r, Index j) {
    T_.row(r) /= T_(r, j);
    for (Index k = 0; k <= rows_; ++k) {
      if (k == r || T_(k, j) == 0.0) continue;
      if (k < rows_ && !active_[k]) continue;
      T_.row(k) -= T_(k, j) * T_.row(r);
      T_(k, j) = 0.0;
    }
    basis_[r] = j;
  }

  // Bland's rule. Returns false when the objective is unbounded below.
  bool run(bool allow_artificial, int& pivots) {
    const Index limit = allow_artificial ? ncols_ : art0_;
    for (;;) {
      Index enter = -1;
      for (Index j = 0; j < limit; ++j)
        if (T_(rows_, j) < -opts_.eps) {
          enter = j;
          break;
        }
      if (enter < 0) return true;

      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index k = 0; k < rows_; ++k) {
        if (!active_[k] || T_(k, enter) <= opts_.eps) continue;
        const double ratio = T_(k, rhs_) / T_(k, enter);
        if (leave < 0 || ratio < best - opts_.eps) {
          best = ratio;
          leave = k;
        } else if (std::abs(ratio - best) <= opts_.eps && basis_[k] < basis_[leave]) {
          leave = k;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++pivots;
      trace("pivot");
    }
  }

  void drive_out_artificials(int& pivots) {
    for (Index k = 0; k < rows_; ++k) {
      if (!active_[k] || basis_[k] < art0_) continue;
      Index col = -1;
      for (Index j = 0; j < art0_; ++j)
        if (std::abs(T_(k, j)) > opts_.eps) {
          col = j;
          break;
        }
      if (col >= 0) {
        pivot(k, col);
        ++pivots;
      } else {
        active_[k] = false;  // redundant equality
      }
    }
  }

  double primal_residual(const Vec& x) const {
    double r = 0.0;
    if (meq_ > 0) r = std::max(r, (lp_.A_eq * x - lp_.b_eq).cwiseAbs().maxCoeff());
    if (mle_ > 0) r = std::max(r, (lp_.A_le * x - lp_.b_le).maxCoeff());
    for (Index j = 0; j < nv_; ++j)
      if (lp_.sign[j] == VarSign::NonNegative) r = std::max(r, -x[j]);
    return std::max(r, 0.0);
  }

  void trace(const char* what) const {
    if (!opts_.trace) return;
    *opts_.trace << "-- " << what << " (basis:";
    for (Index k = 0; k < rows_; ++k)
      if (active_[k]) *opts_.trace << ' ' << basis_[k];
    *opts_.trace << ")\n" << T_ << "\n";
  }

  const LinearProgram& lp_;
  const LpOptions& opts_;
  Index nv_ = 0, meq_ = 0, mle_ = 0, rows_ = 0, ncols_ = 0;
  Index slack0_ = 0, art0_ = 0, rhs_ = 0;
  std::vector<Index> plus_, minus_, basis_;
  std::vector<bool> active_;
  Vec flip_, cost_;
  Mat T_;
};

}  // namespace

LpOutcome lp_solve(const LinearProgram& lp, const LpOptions& opts) {
  validate(lp);
  return Tableau(lp, opts).solve();
}

LpOutcome linear_feasibility(const Mat& A_eq, const Vec& b_eq, const std::vector<VarSign>& sign,
                             const LpOptions& opts) {
  LinearProgram lp;
  lp.c = Vec::Zero(static_cast<Index>(sign.size()));
  lp.A_eq = A_eq;
  lp.b_eq = b_eq;
  lp.A_le = Mat(0, lp.c.size());
  lp.b_le = Vec(0);
  lp.sign = sign;
  return lp_solve(lp, opts);
}

bool verify_farkas(const LinearProgram& lp, const Vec& w, double eps) {
  const Index meq = lp.A_eq.rows();
  const Index mle = lp.A_le.rows();
  if (w.size() != meq + mle || w.size() == 0) return false;
  const double scale = data_scale(lp);
  const double slack = 10.0 * eps * scale;
  Vec at = Vec::Zero(lp.num_vars());
  if (meq > 0) at += lp.A_eq.transpose() * w.head(meq);
  if (mle > 0) at += lp.A_le.transpose() * w.tail(mle);
  for (Index j = 0; j < lp.num_vars(); ++j) {
    if (lp.sign[j] == VarSign::Free ? std::abs(at[j]) > slack : at[j] > slack) return false;
  }
  for (Index k = 0; k < mle; ++k)
    if (w[meq + k] > slack) return false;
  double bw = 0.0;
  if (meq > 0) bw += lp.b_eq.dot(w.head(meq));
  if (mle > 0) bw += lp.b_le.dot(w.tail(mle));
  return bw > eps;
}

}  // namespace mpcac
