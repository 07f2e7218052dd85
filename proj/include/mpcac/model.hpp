#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpcac/expr.hpp"
#include "mpcac/tolerances.hpp"
#include "mpcac/types.hpp"

namespace mpcac {

/// minimize f(x) s.t. g(x) <= 0, h(x) = 0, ||x||_0 <= alpha, with 0 < alpha < n.
class Problem {
 public:
  /// Throws InvalidInput when alpha is outside (0, n) or an expression
  /// references a variable beyond x_n.
  Problem(std::string name, int n, int alpha, Expr f, std::vector<Expr> g,
          std::vector<Expr> h);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int alpha() const { return alpha_; }
  const Expr& f() const { return f_; }
  const std::vector<Expr>& g() const { return g_; }
  const std::vector<Expr>& h() const { return h_; }
  int m() const { return static_cast<int>(g_.size()); }
  int p() const { return static_cast<int>(h_.size()); }

  /// True when every g_i and h_j has degree <= 1.
  bool constraints_affine() const;

 private:
  std::string name_;
  int n_;
  int alpha_;
  Expr f_;
  std::vector<Expr> g_;
  std::vector<Expr> h_;
};

/// Candidate (x, y) for the reformulations, or a plain x for the original problem.
struct PairPoint {
  Vec x;
  std::optional<Vec> y;

  /// The stacked vector (x, y) in R^{2n}. Requires y.
  Vec stacked() const;
};

/// Sign-pattern classification of (x_i, y_i), zero-based sorted indices.
struct IndexSets {
  IndexList i00;     // x_i = 0, y_i = 0
  IndexList i_pm0;   // x_i != 0, y_i = 0
  IndexList i0pm;    // x_i = 0, y_i != 0
  IndexList i0plus;  // x_i = 0, 0 < y_i < 1
  IndexList i0gt;    // x_i = 0, y_i > 0
  IndexList i01;     // x_i = 0, y_i = 1
  IndexList i0;      // x_i = 0
};

/// Classifies every index with |x_i| <= tau, |y_i| <= tau, |y_i - 1| <= tau.
/// Throws InvalidInput without y, and InfeasiblePoint when x_i and y_i are
/// both nonzero (the pattern fits none of the sets).
IndexSets index_sets(const PairPoint& pt, double tau);

/// Number of components with |x_i| > tau.
int cardinality(const Eigen::Ref<const Vec>& x, double tau);

struct CompanionY {
  Vec y;        // y_i = 1 exactly where x_i = 0
  bool unique;  // ||x||_0 == alpha: no other y pairs with x
};

/// Throws InfeasiblePoint when ||x||_0 > alpha.
CompanionY companion_y(const Eigen::Ref<const Vec>& x, int alpha, double tau);

struct AdmissibleRange {
  IndexList min;   // I_0+ U I_01
  IndexList max;   // I_0
  IndexList free;  // I_00, the indices a choice of I may add
};
AdmissibleRange admissible_I_range(const PairPoint& pt, double tau);

/// Throws InvalidInput unless I is sorted, duplicate-free and within the range.
void require_admissible(const PairPoint& pt, const IndexList& I, double tau);

// ---------------------------------------------------------------------------
// Reformulations over the 2n variables (x, y); y_i is variable n + i.

enum class Role {
  G,       // g_i(x) <= 0
  H,       // h_i(x) = 0
  Theta,   // n - alpha - e^T y <= 0
  Xi,      // x_i y_i = 0
  LowerY,  // -y_i <= 0 (or = 0 when tightened)
  UpperY,  // y_i - 1 <= 0
  FixX,    // x_i = 0
};

enum class Sense { LessEqual, Equal };

struct Constraint {
  Role role;
  int index;  // zero-based position within its role; 0 for Theta
  Sense sense;
  Expr expr;

  /// "g1", "h2", "theta", "xi3", "H1", "Htilde2", "G1".
  std::string label() const;
};

enum class ReformKind { Relaxed, MixedInteger, Tightened };

struct ReformulatedProblem {
  ReformKind kind;
  Problem source;
  Expr objective;
  std::vector<Constraint> constraints;
  std::vector<bool> binary;  // per variable; y_i flagged in the mixed-integer form
  std::optional<PairPoint> point;  // tightening data
  IndexList I;

  int num_vars() const { return 2 * source.n(); }
};

ReformulatedProblem build_relaxed(const Problem& p);

/// Same constraint list as build_relaxed plus binary flags on every y_i.
ReformulatedProblem build_mixed_integer(const Problem& p);

/// Drops the integrality flags; reproduces build_relaxed for a mixed-integer form.
ReformulatedProblem relax_binaries(ReformulatedProblem rp);

/// I-tightened problem at a relaxed-feasible point: H_i <= 0 on I_0+ U I_01,
/// H_i = 0 on I_00 U I_+-0, G_i = 0 on I. Throws on an infeasible point or an
/// inadmissible I.
ReformulatedProblem build_tightened(const Problem& p, const PairPoint& pt, const IndexList& I,
                                    const Tolerances& tol = {});

/// Largest violation of any constraint (and of integrality where flagged).
double max_violation(const ReformulatedProblem& rp, const Eigen::Ref<const Vec>& z);

bool is_feasible_mpcac(const Problem& p, const Eigen::Ref<const Vec>& x,
                       const Tolerances& tol = {});
bool is_feasible_relaxed(const Problem& p, const PairPoint& pt, const Tolerances& tol = {});

/// Human-readable listing, one constraint per line with its label.
std::string format_reformulation(const ReformulatedProblem& rp);

std::string format_indices(const IndexList& I);  // "{1,3}" (one-based)

}  // namespace mpcac
