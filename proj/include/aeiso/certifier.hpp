#pragma once

// Recovery of a global isometry from correspondence data and certification
// of how much of the data it explains.
//
// Pipeline: pick d+1 affinely independent points whose pairwise distances are
// preserved, extend the labelling to a global isometry, then test every point
// against it. The set of "valid" pairs is observed through a relative
// tolerance tau: (i, j) is valid iff
//
//     | ||y_i - y_j|| - ||x_i - x_j|| | <= tau * (1 + ||x_i - x_j||).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aeiso/extension.hpp"
#include "aeiso/isometry.hpp"
#include "aeiso/measure.hpp"

namespace aeiso {

struct RecoveryConfig {
  double rank_rtol = kDefaultRankRtol;
  double pair_tol = kDefaultPairTol;
  /// tau: pair validity and pointwise inlier threshold.
  double violation_tol = 1e-6;
  std::size_t ransac_trials = 64;
  double consensus_quorum = 0.7;
  std::uint64_t seed = 0;
  /// Worker threads for consensus trials. Results do not depend on it.
  std::size_t threads = 1;

  /// Throws std::invalid_argument on non-positive tolerances, zero trials or
  /// a quorum outside (0.5, 1].
  void validate() const;
};

using PairPredicate = std::function<bool(std::size_t, std::size_t)>;

/// Pair validity of (i, j) under tolerance tau.
bool pair_valid(const CorrespondenceSet& cs, std::size_t i, std::size_t j, double tau);

/// ||apply(h, x) - y|| <= tau * (1 + ||x||)
bool is_inlier(const EuclideanIsometry& h, const Point& x, const Point& y, double tau);
std::vector<bool> inlier_mask(const EuclideanIsometry& h, const CorrespondenceSet& cs, double tau);
std::size_t count_inliers(const EuclideanIsometry& h, const CorrespondenceSet& cs, double tau);

struct SimplexSelection {
  Simplex simplex;
  std::vector<std::size_t> indices;
};

/// Greedy scan in input order: the first point opens the simplex; each later
/// point joins if it is valid against every chosen point and raises the
/// affine dimension. Throws MathError(InsufficientData) if the scan ends with
/// fewer than d+1 points.
SimplexSelection select_simplex(const PointSet& samples, const PairPredicate& valid,
                                const RecoveryConfig& cfg);

/// As above but scanning `samples` in the given index order.
SimplexSelection select_simplex(const PointSet& samples, std::span<const std::size_t> order,
                                const PairPredicate& valid, const RecoveryConfig& cfg);

struct Recovery {
  EuclideanIsometry isometry;
  std::vector<std::size_t> simplex_indices;
  double repair = 0.0;
};

/// Deterministic: greedy simplex in input order, then extension.
Recovery recover_oracle(const CorrespondenceSet& cs, const RecoveryConfig& cfg);

struct Consensus {
  std::optional<EuclideanIsometry> isometry;
  std::vector<bool> inliers;
  std::size_t inlier_count = 0;
  /// Winning trial; trial 0 scans in input order, later trials in a shuffled order.
  std::size_t trial = 0;
  std::vector<std::size_t> simplex_indices;
  std::size_t successful_trials = 0;
};

/// Best consensus over cfg.ransac_trials candidate simplexes, without the
/// quorum test. Ties go to the lowest trial index, so the result does not
/// depend on cfg.threads.
Consensus best_consensus(const CorrespondenceSet& cs, const RecoveryConfig& cfg);

struct RobustRecovery {
  EuclideanIsometry isometry;
  std::vector<bool> inliers;
  std::size_t inlier_count = 0;
  std::vector<std::size_t> simplex_indices;
};

/// best_consensus, failing with NoConsensus below quorum * n inliers.
RobustRecovery recover_robust(const CorrespondenceSet& cs, const RecoveryConfig& cfg);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  /// Nearest-rank 95th percentile.
  double p95 = 0.0;
};

struct CertificationReport {
  std::size_t dimension = 0;
  std::size_t n = 0;
  std::optional<EuclideanIsometry> recovered;
  /// Fraction of points with residual above tau * (1 + ||x||); 1 when
  /// recovery failed.
  double violation_rate_hat = 1.0;
  WilsonInterval confidence_interval;
  std::size_t inlier_count = 0;
  std::size_t outlier_count = 0;
  ResidualStats residual_stats;
  std::size_t support_dimension = 0;
  /// Why recovery failed; empty on success.
  std::string failure;

  std::vector<double> residuals;
  std::vector<bool> inliers;
};

/// Never throws on well-formed input; failures are reported in-band.
CertificationReport certify(const CorrespondenceSet& cs, const RecoveryConfig& cfg);

/// Per point: is y_z equidistant (within tol) to H(x_z) from every anchor?
/// `anchors` are the recovery simplex's images under H. Agrees with the
/// direct residual test whenever residuals are far from tol.
std::vector<bool> verify_pointwise(const EuclideanIsometry& h, const CorrespondenceSet& cs,
                                   const PointSet& anchors, double tol);

/// Least-squares isometry over the masked correspondences: centre both
/// clouds, project the cross-covariance onto O(d). Reflections are allowed.
/// Throws MathError(DegenerateSupport) if the inlier x-set is not full-dimensional.
EuclideanIsometry procrustes_fit(const CorrespondenceSet& cs, const std::vector<bool>& inliers,
                                 double rank_rtol = kDefaultRankRtol);

}  // namespace aeiso
