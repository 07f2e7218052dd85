#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mpcac/model.hpp"
#include "mpcac/tolerances.hpp"
#include "mpcac/types.hpp"

namespace mpcac {

enum class Condition { W, S, M, KktRelaxed };
enum class Verdict { Holds, Fails };

const char* to_string(Condition c);
const char* to_string(Verdict v);

/// Multipliers of the I-tightened Lagrangian: theta, H, Htilde and G (on I).
struct FullMultipliers {
  double theta = 0.0;
  Vec H;
  Vec Htilde;
  Vec G;  // aligned with the certificate's I
  /// Residuals of the five defining items: gradient rows (x and y blocks),
  /// g-complementarity, theta-complementarity, Htilde-complementarity, and
  /// H_i = 0 on I_0+ U I_01. Sign violations of the nonnegative blocks are
  /// folded into the matching complementarity entry.
  std::array<double, 5> items{};
};

/// Multipliers of the relaxed problem's own KKT system.
struct RelaxedKktMultipliers {
  Vec g;
  Vec h;
  double theta = 0.0;
  Vec mu;      // on H_i = -y_i <= 0
  Vec Htilde;  // on y_i - 1 <= 0
  Vec xi;      // on x_i y_i = 0
};

struct StationarityCertificate {
  Condition condition = Condition::W;
  Verdict verdict = Verdict::Fails;
  IndexList I;
  // Reduced system: grad f + sum lambda_g grad g + sum lambda_h grad h + sum_{i in I} gamma_i e_i = 0.
  Vec lambda_g;
  Vec lambda_h;
  Vec gamma;  // aligned with I
  std::optional<FullMultipliers> full;
  std::optional<RelaxedKktMultipliers> kkt;
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  Vec farkas;  // when verdict == Fails
  Tolerances tol;

  bool holds() const { return verdict == Verdict::Holds; }
};

/// W_I-stationarity through the reduced multiplier system in x only. Inactive
/// g_i carry a zero multiplier, which makes (lambda_g)^T g(x) = 0 exact.
/// Throws InfeasiblePoint / InvalidInput for an infeasible point or bad I.
StationarityCertificate check_w_stationary(const Problem& p, const PairPoint& pt,
                                           const IndexList& I, const Tolerances& tol = {});

/// W_I with I = I_0+ U I_01.
StationarityCertificate check_s_stationary(const Problem& p, const PairPoint& pt,
                                           const Tolerances& tol = {});

/// W_I with I = I_0.
StationarityCertificate check_m_stationary(const Problem& p, const PairPoint& pt,
                                           const Tolerances& tol = {});

/// KKT of the relaxed problem, decided twice: by the direct multiplier system
/// over (x, y) and by S-stationarity. Disagreement throws InternalError.
StationarityCertificate check_kkt_relaxed(const Problem& p, const PairPoint& pt,
                                          const Tolerances& tol = {});

/// Completes a holding certificate to tightened-Lagrangian multipliers and
/// re-verifies all defining items. W/S/M certificates use lambda_G = gamma with
/// theta, H, Htilde zero; KKT certificates are mapped through their xi and mu
/// multipliers onto I = I_0+ U I_01. Throws InvalidInput on a failing
/// certificate and InternalError if the completed vector does not verify.
StationarityCertificate recover_full_multipliers(const StationarityCertificate& cert,
                                                 const Problem& p, const PairPoint& pt);

// ---------------------------------------------------------------------------

/// KKT feasibility of an arbitrary reformulation at z: one multiplier per
/// constraint, free on equalities, nonnegative on active inequalities and zero
/// on inactive ones.
struct KktSystemResult {
  bool holds = false;
  Vec multipliers;  // per constraint of the reformulation
  double residual = 0.0;
  Vec farkas;
};
KktSystemResult kkt_feasibility(const ReformulatedProblem& rp, const Eigen::Ref<const Vec>& z,
                                const Tolerances& tol = {});

// ---------------------------------------------------------------------------

struct ProfileEntry {
  IndexList I;
  Verdict verdict;
};

struct StationarityProfile {
  IndexList i_min;
  IndexList free;  // I_00
  std::vector<ProfileEntry> entries;  // subsets of I_00 by size, then lexicographic
  std::vector<IndexList> minimal;     // minimal stationary sets, same order
};

/// Decides W_I for every admissible I and reports the minimal stationary sets.
/// Checks that the stationary family is closed under enlarging I.
/// Throws CapExceeded when |I_00| > cap.
StationarityProfile stationarity_profile(const Problem& p, const PairPoint& pt, int cap = 12,
                                         const Tolerances& tol = {});

}  // namespace mpcac
