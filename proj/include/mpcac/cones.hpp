#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mpcac/model.hpp"
#include "mpcac/tolerances.hpp"
#include "mpcac/types.hpp"

namespace mpcac {

/// Conic generators: rays and a lineality basis, both stored as columns.
/// Rays are scaled to unit max-norm.
struct Generators {
  Mat rays;
  Mat lineality;
};

/// { d : E d = 0, A d <= 0 } in halfspace form, rows of E and A as normals.
///
/// Generators are computed on first request and shared by copies of the cone.
class PolyhedralCone {
 public:
  PolyhedralCone(Index dim, Mat equalities, Mat inequalities);
  static PolyhedralCone full_space(Index dim);

  Index dim() const { return dim_; }
  const Mat& equalities() const { return eq_; }
  const Mat& inequalities() const { return ineq_; }

  /// Row residuals within eps, scaled by each row norm and ||d||.
  bool contains(const Eigen::Ref<const Vec>& d, double eps = 1e-9) const;

  /// Throws CapExceeded above dimension 12.
  const Generators& generators() const;

 private:
  struct Cache;
  Index dim_;
  Mat eq_;
  Mat ineq_;
  std::shared_ptr<Cache> cache_;
};

/// Double-description enumeration of extreme rays and a lineality basis.
/// Throws CapExceeded when the ambient dimension exceeds 12.
Generators generators(const PolyhedralCone& c, double eps = 1e-9);

/// Finite union of polyhedral cones; `labels` says how each piece arose.
struct ConeUnion {
  Index dim = 0;
  std::vector<PolyhedralCone> pieces;
  std::vector<std::string> labels;

  bool contains(const Eigen::Ref<const Vec>& d, double eps = 1e-9) const;
};

/// { p : p^T d <= 0 for all d in c }, with the generators of c as normals.
PolyhedralCone polar(const PolyhedralCone& c);

/// Polar of a union: the intersection of the piece polars.
PolyhedralCone polar_union(const ConeUnion& u);

/// inner is a subset of outer, decided on the generators of inner.
bool cone_includes(const PolyhedralCone& outer, const PolyhedralCone& inner, double eps = 1e-9);

bool cones_equal(const PolyhedralCone& a, const PolyhedralCone& b, double eps = 1e-9);

struct UnionComparison {
  bool equal = false;
  /// Set when equality was accepted after sampling conic combinations of the
  /// cone's generators rather than proved.
  bool sampled = false;
  std::string detail;
  Vec witness;  // a direction separating the two sides when unequal
};

/// Compares a union of cones with one polyhedral cone. Every piece must lie in
/// the cone and every generator of the cone must lie in some piece. When the
/// generators are spread over several pieces, `samples` seeded conic
/// combinations are tested as well.
UnionComparison union_equals_cone(const ConeUnion& u, const PolyhedralCone& c,
                                  double eps = 1e-9, int samples = 1000);

// ---------------------------------------------------------------------------
// Feasible sets with complementarity: { (x, y) : B z <= b, E z = e, x * y = 0 }.

struct AffinePairSet {
  int n = 0;
  Mat ineq;  // rows over z = (x, y) in R^{2n}
  Vec ineq_rhs;
  Mat eq;
  Vec eq_rhs;
  std::vector<std::string> ineq_labels;
  std::vector<std::string> eq_labels;

  /// Every row touches only x or only y.
  bool separable() const;
};

/// The relaxed problem's feasible set. Throws OutOfScope when some g_i or h_j
/// is nonlinear.
AffinePairSet relaxed_pair_set(const Problem& p);

/// Active inequality normals, equality normals and complementarity gradients.
PolyhedralCone linearized_cone(const AffinePairSet& s, const PairPoint& pt,
                               const Tolerances& tol = {});

/// Linearized cone of any reformulation at z: active inequality gradients and
/// all equality gradients.
PolyhedralCone linearized_cone(const ReformulatedProblem& rp, const Eigen::Ref<const Vec>& z,
                               const Tolerances& tol = {});

/// Tangent cone as a union over the 2^|I_00| ways of fixing x_i = 0 or y_i = 0
/// on I_00. Throws CapExceeded when |I_00| > cap.
ConeUnion tangent_cone_pieces(const AffinePairSet& s, const PairPoint& pt, int cap = 12,
                              const Tolerances& tol = {});

struct CqVerdict {
  bool holds = false;
  bool exact = true;
  std::string detail;
};

CqVerdict check_acq(const AffinePairSet& s, const PairPoint& pt, const Tolerances& tol = {});
CqVerdict check_gcq(const AffinePairSet& s, const PairPoint& pt, const Tolerances& tol = {});
CqVerdict check_acq(const Problem& p, const PairPoint& pt, const Tolerances& tol = {});
CqVerdict check_gcq(const Problem& p, const PairPoint& pt, const Tolerances& tol = {});

/// Active gradients of the relaxed problem have full row rank.
CqVerdict check_licq(const Problem& p, const PairPoint& pt, const Tolerances& tol = {});

/// Equality gradients independent and some d strictly decreases every active
/// inequality while keeping the equalities.
CqVerdict check_mfcq(const Problem& p, const PairPoint& pt, const Tolerances& tol = {});

}  // namespace mpcac
