#pragma once

namespace mpcac {

/// Numerical thresholds shared by every module. Reports embed the values used.
struct Tolerances {
  double zero = 1e-9;      // x_i = 0, y_i = 0, y_i = 1 tests; cardinality count
  double feas = 1e-8;      // constraint residuals
  double lp = 1e-9;        // simplex pivots and feasibility
  double cert = 1e-7;      // stationarity residual acceptance
  double cone = 1e-9;      // cone membership
  double rank_rel = 1e-8;  // rank threshold, relative to the largest row norm
  double tie = 1e-8;       // objective ties in support enumeration
};

}  // namespace mpcac
