#pragma once

#include <vector>

#include "aeiso/geometry.hpp"

namespace aeiso {

inline constexpr double kDefaultResidualTol = 1e-8;

/// d+1 anchors and the measured distance from the unknown point to each.
struct AnchorSet {
  /// Anchors are validated by locate(), which reports DegenerateAnchors.
  AnchorSet(PointSet anchors, std::vector<double> distances);

  PointSet anchors;
  std::vector<double> distances;
};

/// Distances from z to every anchor, in anchor order.
std::vector<double> distances_to(const PointSet& anchors, const Point& z);

/// The unique point at the given distances from d+1 affinely independent
/// anchors. The sphere equation of anchor 0 is subtracted from the others,
/// leaving 2 (a_i - a_0)^T u = |a_i - a_0|^2 + r_0^2 - r_i^2 for
/// u = z - a_0; the solution is then checked against every sphere.
///
/// Errors: DegenerateAnchors, Infeasible (no point has these distances).
Point locate(const AnchorSet& a, double res_tol = kDefaultResidualTol,
             double rtol = kDefaultRankRtol);

/// True iff |‖p - a_i‖ - ‖q - a_i‖| <= tol for every anchor. With a full
/// simplex of anchors and exact arithmetic this forces p == q; with fewer
/// anchors mirror images are indistinguishable.
///
/// Errors: DegenerateAnchors when the anchors are affinely dependent.
bool equidistance_collapse(const Point& p, const Point& q, const PointSet& anchors, double tol,
                           double rtol = kDefaultRankRtol);

}  // namespace aeiso
