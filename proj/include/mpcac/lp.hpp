#pragma once

#include <iosfwd>
#include <vector>

#include "mpcac/types.hpp"

namespace mpcac {

enum class VarSign { Free, NonNegative };

/// minimize c^T z  s.t.  A_eq z = b_eq,  A_le z <= b_le,  z_j >= 0 where flagged.
struct LinearProgram {
  Vec c;
  Mat A_eq;
  Vec b_eq;
  Mat A_le;
  Vec b_le;
  std::vector<VarSign> sign;

  Index num_vars() const { return c.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Vec x;                   // optimal primal solution
  double objective = 0.0;  // c^T x, recomputed from x
  double residual = 0.0;   // largest primal violation of x
  /// Farkas multipliers w = (w_eq, w_le) when infeasible, scaled to unit max-norm:
  /// (A^T w)_j <= 0 on nonnegative columns, (A^T w)_j = 0 on free columns,
  /// w_le <= 0, and b^T w > 0. Such a w rules out every feasible z.
  Vec farkas;
  int pivots = 0;
};

/// Process-wide tableau trace picked up by default-constructed LpOptions.
void set_default_lp_trace(std::ostream* out);
std::ostream* default_lp_trace();

struct LpOptions {
  double eps = 1e-9;                          // pivot and feasibility tolerance
  std::ostream* trace = default_lp_trace();  // tableau dump after every pivot
};

/// Dense two-phase tableau simplex with Bland's rule. Deterministic.
/// Throws InvalidInput on inconsistent dimensions or non-finite data.
LpOutcome lp_solve(const LinearProgram& lp, const LpOptions& opts = {});

/// Feasibility of { z : A_eq z = b_eq, sign restrictions } (c = 0).
LpOutcome linear_feasibility(const Mat& A_eq, const Vec& b_eq, const std::vector<VarSign>& sign,
                             const LpOptions& opts = {});

/// Direct re-check of a Farkas certificate against the program's data.
bool verify_farkas(const LinearProgram& lp, const Vec& w, double eps);

}  // namespace mpcac
