#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpcac/cones.hpp"
#include "mpcac/model.hpp"
#include "mpcac/stationarity.hpp"
#include "mpcac/tolerances.hpp"
#include "mpcac/types.hpp"

namespace mpcac {

enum class SolveStatus { Converged, NotConverged, Infeasible, Unbounded };

const char* to_string(SolveStatus s);

struct SolveOptions {
  int starts = 8;
  double kkt_tol = 1e-6;
  int max_outer = 50;
  int max_inner = 500;
  double armijo = 1e-4;
  long max_supports = 100000;
  Tolerances tol;
};

/// One reduced subproblem: min f s.t. g <= 0, h = 0, x_i = 0 off the support.
struct ReducedResult {
  Vec x;  // full length n, exact zeros off the support
  double objective = 0.0;
  double kkt_residual = 0.0;
  double violation = 0.0;
  Vec lambda_g;
  Vec lambda_h;
  SolveStatus status = SolveStatus::NotConverged;
  int outer_iterations = 0;
};

/// Augmented Lagrangian (PHR) with a gradient-descent inner loop. The final
/// iterate is projected onto the violated constraints before its residual is
/// measured, so a converged status always refers to a feasible point.
ReducedResult solve_reduced(const Problem& p, const IndexList& support,
                            const Eigen::Ref<const Vec>& start, const SolveOptions& opts = {});

/// f quadratic and g, h affine once the off-support variables are fixed to 0.
bool is_affine_quadratic(const Problem& p, const IndexList& support);

struct QpResult {
  Vec x;
  double objective = 0.0;
  double residual = 0.0;
  Vec lambda_g;
  Vec lambda_h;
  SolveStatus status = SolveStatus::NotConverged;
  /// The reduced Hessian was indefinite and the result comes from solve_reduced.
  bool fallback = false;
  int iterations = 0;
};

/// Primal active-set method on the reduced problem. Throws InvalidInput unless
/// is_affine_quadratic holds.
QpResult solve_qp_affine(const Problem& p, const IndexList& support, const SolveOptions& opts = {});

struct SupportResult {
  IndexList support;
  Vec x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double violation = 0.0;
  SolveStatus status = SolveStatus::NotConverged;
  std::string method;  // "active-set", "augmented-lagrangian", "active-set+fallback"
  int starts_used = 0;
};

struct SolveReport {
  bool found = false;
  Vec x;
  double objective = 0.0;
  IndexList support;
  Vec companion_y;
  /// Every support went through the exact convex path.
  bool certified_global = false;
  /// The winner is only feasible, not KKT-converged.
  bool best_found_only = false;
  std::vector<SupportResult> table;  // supports in lexicographic order
  std::vector<IndexList> ties;
};

/// Solves the reduced problem of one support: exact path when affine-quadratic,
/// multi-start augmented Lagrangian otherwise.
SupportResult solve_support(const Problem& p, const IndexList& support,
                            const SolveOptions& opts = {});

/// Global solve by enumerating the C(n, alpha) supports of size alpha. The
/// winner is the lowest objective among converged supports (feasible ones if
/// none converged), ties within eps_tie going to the lexicographically first.
/// Throws CapExceeded when C(n, alpha) exceeds opts.max_supports.
SolveReport solve_brute(const Problem& p, const SolveOptions& opts = {});

struct MixedIntegerReport {
  bool found = false;
  double objective = 0.0;
  Vec x;
  Vec y;
  int assignments = 0;  // binary y with e^T y >= n - alpha
};

/// Exhaustive binary-y enumeration of the mixed-integer reformulation: each y
/// fixes x_i = 0 where y_i = 1, and the rest is a reduced subproblem.
MixedIntegerReport solve_mixed_integer_enumeration(const Problem& p, const SolveOptions& opts = {});

/// Starting points for a support of size k: origin, +-0.5 e, then seeded
/// uniform draws in [-1, 1]^k with seeds 4, 5, ...
std::vector<Vec> start_points(int k, int starts);

// ---------------------------------------------------------------------------

struct PairDiagnostic {
  Vec y;
  bool canonical = false;
  IndexSets sets;
  StationarityProfile profile;
  StationarityCertificate kkt;
  StationarityCertificate s;
  StationarityCertificate m;
  CqVerdict licq;
  CqVerdict mfcq;
  std::optional<CqVerdict> acq;
  std::optional<CqVerdict> gcq;
  std::string cq_note;  // why ACQ/GCQ were not decided
};

struct MpcacDiagnostic {
  Vec x;
  double objective = 0.0;
  int cardinality = 0;
  Vec companion_y;
  bool companion_unique = false;
  std::vector<PairDiagnostic> pairs;
};

/// Pairs a feasible x with every binary y the mixed-integer form admits (only
/// the canonical companion when more than 8 components vanish) and runs the
/// index sets, stationarity profile and CQ checks on each pair.
/// Throws InfeasiblePoint when x is not MPCaC-feasible.
MpcacDiagnostic kkt_residual_mpcac_report(const Problem& p, const Eigen::Ref<const Vec>& x,
                                          const Tolerances& tol = {});

}  // namespace mpcac
