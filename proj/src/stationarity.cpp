#include "mpcac/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mpcac/error.hpp"
#include "mpcac/lp.hpp"

namespace mpcac {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::W:
      return "W";
    case Condition::S:
      return "S";
    case Condition::M:
      return "M";
    case Condition::KktRelaxed:
      return "KKT";
  }
  return "?";
}

const char* to_string(Verdict v) { return v == Verdict::Holds ? "holds" : "fails"; }

namespace {

void require_relaxed_feasible(const Problem& p, const PairPoint& pt, const Tolerances& tol) {
  if (pt.x.size() != p.n() || !pt.y || pt.y->size() != p.n())
    throw InvalidInput("point must provide x and y of dimension n = " + std::to_string(p.n()));
  if (!is_feasible_relaxed(p, pt, tol))
    throw InfeasiblePoint("point is not feasible for the relaxed problem");
}

LpOptions lp_options(const Tolerances& tol) {
  LpOptions o;
  o.eps = tol.lp;
  return o;
}

}  // namespace

StationarityCertificate check_w_stationary(const Problem& p, const PairPoint& pt,
                                           const IndexList& I, const Tolerances& tol) {
  require_relaxed_feasible(p, pt, tol);
  require_admissible(pt, I, tol.zero);
  const int n = p.n();
  const Vec& x = pt.x;

  std::vector<int> active;
  Vec gval(p.m());
  for (int i = 0; i < p.m(); ++i) {
    gval[i] = eval(p.g()[i], x);
    if (gval[i] >= -tol.feas) active.push_back(i);
  }
  const Index na = static_cast<Index>(active.size());
  const Index cols = na + p.p() + static_cast<Index>(I.size());

  Mat A = Mat::Zero(n, cols);
  std::vector<VarSign> sign(cols, VarSign::Free);
  for (Index k = 0; k < na; ++k) {
    A.col(k) = grad(p.g()[active[k]], x);
    sign[k] = VarSign::NonNegative;
  }
  for (int j = 0; j < p.p(); ++j) A.col(na + j) = grad(p.h()[j], x);
  for (std::size_t k = 0; k < I.size(); ++k) A(I[k], na + p.p() + static_cast<Index>(k)) = 1.0;
  const Vec grad_f = grad(p.f(), x);

  StationarityCertificate cert;
  cert.condition = Condition::W;
  cert.I = I;
  cert.tol = tol;
  cert.lambda_g = Vec::Zero(p.m());
  cert.lambda_h = Vec::Zero(p.p());
  cert.gamma = Vec::Zero(static_cast<Index>(I.size()));

  LpOutcome out = linear_feasibility(A, -grad_f, sign, lp_options(tol));
  if (out.status != LpStatus::Optimal) {
    cert.verdict = Verdict::Fails;
    cert.farkas = out.farkas;
    return cert;
  }
  for (Index k = 0; k < na; ++k) cert.lambda_g[active[k]] = out.x[k];
  cert.lambda_h = out.x.segment(na, p.p());
  cert.gamma = out.x.tail(static_cast<Index>(I.size()));

  cert.stationarity_residual = (grad_f + A * out.x).cwiseAbs().maxCoeff();
  cert.complementarity_residual = std::abs(cert.lambda_g.dot(gval));
  const double min_lambda = p.m() > 0 ? cert.lambda_g.minCoeff() : 0.0;
  if (cert.stationarity_residual > tol.cert || cert.complementarity_residual > tol.cert ||
      min_lambda < -tol.cert)
    throw InternalError("multiplier system solved but the certificate residual exceeds eps_cert");
  cert.verdict = Verdict::Holds;
  return cert;
}

StationarityCertificate check_s_stationary(const Problem& p, const PairPoint& pt,
                                           const Tolerances& tol) {
  require_relaxed_feasible(p, pt, tol);
  StationarityCertificate c = check_w_stationary(p, pt, admissible_I_range(pt, tol.zero).min, tol);
  c.condition = Condition::S;
  return c;
}

StationarityCertificate check_m_stationary(const Problem& p, const PairPoint& pt,
                                           const Tolerances& tol) {
  require_relaxed_feasible(p, pt, tol);
  StationarityCertificate c = check_w_stationary(p, pt, admissible_I_range(pt, tol.zero).max, tol);
  c.condition = Condition::M;
  return c;
}

KktSystemResult kkt_feasibility(const ReformulatedProblem& rp, const Eigen::Ref<const Vec>& z,
                                const Tolerances& tol) {
  const Index nz = rp.num_vars();
  if (z.size() != nz) throw InvalidInput("point dimension does not match the reformulation");
  const Index nc = static_cast<Index>(rp.constraints.size());

  std::vector<Index> used;
  std::vector<VarSign> sign;
  for (Index k = 0; k < nc; ++k) {
    const Constraint& c = rp.constraints[k];
    if (c.sense == Sense::Equal) {
      used.push_back(k);
      sign.push_back(VarSign::Free);
    } else if (eval(c.expr, z) >= -tol.feas) {
      used.push_back(k);
      sign.push_back(VarSign::NonNegative);
    }
  }
  Mat A(nz, static_cast<Index>(used.size()));
  for (std::size_t j = 0; j < used.size(); ++j)
    A.col(static_cast<Index>(j)) = grad(rp.constraints[used[j]].expr, z);
  const Vec grad_f = grad(rp.objective, z);

  KktSystemResult r;
  r.multipliers = Vec::Zero(nc);
  LpOutcome out = linear_feasibility(A, -grad_f, sign, lp_options(tol));
  if (out.status != LpStatus::Optimal) {
    r.farkas = out.farkas;
    return r;
  }
  for (std::size_t j = 0; j < used.size(); ++j) r.multipliers[used[j]] = out.x[static_cast<Index>(j)];
  r.residual = (grad_f + A * out.x).cwiseAbs().maxCoeff();
  r.holds = r.residual <= tol.cert;
  if (!r.holds) throw InternalError("KKT system solved but its residual exceeds eps_cert");
  return r;
}

StationarityCertificate check_kkt_relaxed(const Problem& p, const PairPoint& pt,
                                          const Tolerances& tol) {
  require_relaxed_feasible(p, pt, tol);
  const ReformulatedProblem rp = build_relaxed(p);
  const KktSystemResult direct = kkt_feasibility(rp, pt.stacked(), tol);
  StationarityCertificate cert = check_s_stationary(p, pt, tol);
  if (direct.holds != cert.holds())
    throw InternalError(std::string("relaxed KKT (direct) says ") +
                        (direct.holds ? "holds" : "fails") + " but S-stationarity says " +
                        to_string(cert.verdict));
  cert.condition = Condition::KktRelaxed;
  if (!direct.holds) {
    cert.farkas = direct.farkas;
    return cert;
  }

  const int n = p.n();
  RelaxedKktMultipliers k;
  k.g = Vec::Zero(p.m());
  k.h = Vec::Zero(p.p());
  k.mu = Vec::Zero(n);
  k.Htilde = Vec::Zero(n);
  k.xi = Vec::Zero(n);
  for (std::size_t j = 0; j < rp.constraints.size(); ++j) {
    const Constraint& c = rp.constraints[j];
    const double v = direct.multipliers[static_cast<Index>(j)];
    switch (c.role) {
      case Role::G:
        k.g[c.index] = v;
        break;
      case Role::H:
        k.h[c.index] = v;
        break;
      case Role::Theta:
        k.theta = v;
        break;
      case Role::Xi:
        k.xi[c.index] = v;
        break;
      case Role::LowerY:
        k.mu[c.index] = v;
        break;
      case Role::UpperY:
        k.Htilde[c.index] = v;
        break;
      case Role::FixX:
        break;
    }
  }
  cert.kkt = k;
  cert.stationarity_residual = std::max(cert.stationarity_residual, direct.residual);
  return cert;
}

StationarityCertificate recover_full_multipliers(const StationarityCertificate& cert,
                                                 const Problem& p, const PairPoint& pt) {
  if (!cert.holds()) throw InvalidInput("cannot recover multipliers from a failing certificate");
  const Tolerances& tol = cert.tol;
  require_relaxed_feasible(p, pt, tol);
  const int n = p.n();
  const Vec& x = pt.x;
  const Vec& y = *pt.y;
  const IndexSets s = index_sets(pt, tol.zero);

  StationarityCertificate out = cert;
  FullMultipliers full;
  full.H = Vec::Zero(n);
  full.Htilde = Vec::Zero(n);
  full.G = Vec::Zero(static_cast<Index>(cert.I.size()));
  Vec lambda_g = cert.lambda_g;
  Vec lambda_h = cert.lambda_h;

  if (cert.condition == Condition::KktRelaxed && cert.kkt) {
    // lambda_G = xi * y on I_01 U I_0+; lambda_H = mu on I_0, mu - xi * x on I_+-0.
    const RelaxedKktMultipliers& k = *cert.kkt;
    lambda_g = k.g;
    lambda_h = k.h;
    full.theta = k.theta;
    full.Htilde = k.Htilde;
    for (int i = 0; i < n; ++i) full.H[i] = k.mu[i];
    for (int i : s.i_pm0) full.H[i] = k.mu[i] - k.xi[i] * x[i];
    for (std::size_t j = 0; j < cert.I.size(); ++j) {
      const int i = cert.I[j];
      full.G[static_cast<Index>(j)] = k.xi[i] * y[i];
    }
    out.lambda_g = lambda_g;
    out.lambda_h = lambda_h;
    out.gamma = full.G;
  } else {
    full.G = cert.gamma;
  }

  // Item 1: both gradient blocks of the tightened Lagrangian vanish.
  Vec rx = grad(p.f(), x);
  for (int i = 0; i < p.m(); ++i) rx += lambda_g[i] * grad(p.g()[i], x);
  for (int j = 0; j < p.p(); ++j) rx += lambda_h[j] * grad(p.h()[j], x);
  for (std::size_t j = 0; j < cert.I.size(); ++j) rx[cert.I[j]] += full.G[static_cast<Index>(j)];
  const Vec ry = -full.theta * Vec::Ones(n) - full.H + full.Htilde;
  full.items[0] = std::max(rx.cwiseAbs().maxCoeff(), ry.cwiseAbs().maxCoeff());

  // Item 2: lambda_g >= 0 and (lambda_g)^T g = 0.
  double comp_g = 0.0, neg_g = 0.0;
  for (int i = 0; i < p.m(); ++i) {
    comp_g += lambda_g[i] * eval(p.g()[i], x);
    neg_g = std::max(neg_g, -lambda_g[i]);
  }
  full.items[1] = std::max(std::abs(comp_g), neg_g);

  // Item 3: lambda_theta >= 0 and lambda_theta * theta = 0.
  const double theta = static_cast<double>(n - p.alpha()) - y.sum();
  full.items[2] = std::max(std::abs(full.theta * theta), std::max(0.0, -full.theta));

  // Item 4: lambda_Htilde >= 0 and (lambda_Htilde)^T (y - e) = 0.
  const double comp_ht = full.Htilde.dot((y.array() - 1.0).matrix());
  full.items[3] = std::max(std::abs(comp_ht), std::max(0.0, -full.Htilde.minCoeff()));

  // Item 5: lambda_H vanishes on I_0+ U I_01.
  double h5 = 0.0;
  for (int i : s.i0plus) h5 = std::max(h5, std::abs(full.H[i]));
  for (int i : s.i01) h5 = std::max(h5, std::abs(full.H[i]));
  full.items[4] = h5;

  for (double r : full.items)
    if (r > tol.cert)
      throw InternalError("recovered multipliers violate a defining item by " + std::to_string(r));
  out.full = full;
  return out;
}

StationarityProfile stationarity_profile(const Problem& p, const PairPoint& pt, int cap,
                                         const Tolerances& tol) {
  require_relaxed_feasible(p, pt, tol);
  const AdmissibleRange range = admissible_I_range(pt, tol.zero);
  const int k = static_cast<int>(range.free.size());
  if (k > cap)
    throw CapExceeded("|I_00| = " + std::to_string(k) + " exceeds the enumeration cap " +
                      std::to_string(cap));

  StationarityProfile prof;
  prof.i_min = range.min;
  prof.free = range.free;

  // Masks over I_00 ordered by popcount, then lexicographically by index list.
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1u << k); ++m) masks.push_back(m);
  auto as_list = [&](unsigned m) {
    IndexList l;
    for (int b = 0; b < k; ++b)
      if (m & (1u << b)) l.push_back(b);
    return l;
  };
  std::stable_sort(masks.begin(), masks.end(), [&](unsigned a, unsigned b) {
    const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    if (pa != pb) return pa < pb;
    return as_list(a) < as_list(b);
  });

  std::map<unsigned, bool> holds;
  for (unsigned m : masks) {
    IndexList I = range.min;
    for (int b = 0; b < k; ++b)
      if (m & (1u << b)) I.push_back(range.free[b]);
    std::sort(I.begin(), I.end());
    const bool h = check_w_stationary(p, pt, I, tol).holds();
    holds[m] = h;
    prof.entries.push_back({I, h ? Verdict::Holds : Verdict::Fails});
  }

  for (std::size_t e = 0; e < masks.size(); ++e) {
    const unsigned m = masks[e];
    if (!holds[m]) continue;
    bool minimal = true;
    for (int b = 0; b < k; ++b) {
      const unsigned bit = 1u << b;
      if (!(m & bit) && !holds[m | bit])
        throw InternalError("W_I-stationarity is not preserved when enlarging I = " +
                            format_indices(prof.entries[e].I));
      if ((m & bit) && holds[m & ~bit]) minimal = false;
    }
    if (minimal) prof.minimal.push_back(prof.entries[e].I);
  }
  return prof;
}

}  // namespace mpcac
