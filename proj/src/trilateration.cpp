#include "aeiso/trilateration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aeiso/errors.hpp"

namespace aeiso {

AnchorSet::AnchorSet(PointSet a, std::vector<double> r)
    : anchors(std::move(a)), distances(std::move(r)) {
  if (anchors.empty()) throw std::invalid_argument("anchor set is empty");
  const auto d = static_cast<std::size_t>(anchors.front().size());
  require_dimension(d);
  require_uniform_dimension(anchors, d);
  if (anchors.size() != d + 1 || distances.size() != d + 1) {
    throw std::invalid_argument("trilateration in dimension " + std::to_string(d) + " needs " +
                                std::to_string(d + 1) + " anchors and distances");
  }
  for (const auto& p : anchors) require_finite(p);
  for (double r : distances) {
    if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("distances must be finite and >= 0");
  }
}

std::vector<double> distances_to(const PointSet& anchors, const Point& z) {
  std::vector<double> out;
  out.reserve(anchors.size());
  for (const auto& a : anchors) out.push_back(distance(a, z));
  return out;
}

namespace {

double worst_miss(const AnchorSet& a, const Point& z) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.anchors.size(); ++i) {
    worst = std::max(worst, std::abs(distance(z, a.anchors[i]) - a.distances[i]));
  }
  return worst;
}

// The linearised solve loses accuracy to the cancellation in r0^2 - ri^2.
// A couple of Gauss-Newton steps on the unsquared residuals |z - a_i| - r_i
// recover it. Rows for anchors that z sits on are dropped (no gradient).
Point polish(const AnchorSet& a, Point z) {
  const auto d = z.size();
  double best = worst_miss(a, z);
  for (int step = 0; step < 2 && best > 0.0; ++step) {
    Matrix jac(static_cast<Eigen::Index>(a.anchors.size()), d);
    Point res(jac.rows());
    Eigen::Index rows = 0;
    for (std::size_t i = 0; i < a.anchors.size(); ++i) {
      const Point diff = z - a.anchors[i];
      const double len = diff.norm();
      if (len == 0.0) continue;
      jac.row(rows) = diff.transpose() / len;
      res[rows++] = len - a.distances[i];
    }
    if (rows < d) break;
    const Point next = z - jac.topRows(rows).colPivHouseholderQr().solve(res.head(rows));
    const double miss = worst_miss(a, next);
    if (!next.allFinite() || !(miss < best)) break;
    z = next;
    best = miss;
  }
  return z;
}

}  // namespace

Point locate(const AnchorSet& a, double res_tol, double rtol) {
  if (!(res_tol > 0.0)) throw std::invalid_argument("res_tol must be positive");
  if (!affinely_independent(a.anchors, rtol)) {
    throw MathError(MathErrorKind::DegenerateAnchors, "anchors are not affinely independent");
  }
  const Matrix edges = edge_matrix(a.anchors);
  const auto d = edges.cols();
  const double r0 = a.distances[0];
  Point rhs(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double ri = a.distances[static_cast<std::size_t>(i) + 1];
    rhs[i] = edges.col(i).squaredNorm() + (r0 - ri) * (r0 + ri);
  }
  const Eigen::PartialPivLU<Matrix> lu(2.0 * edges.transpose());
  Point z = a.anchors[0] + lu.solve(rhs);
  if (!z.allFinite()) throw MathError(MathErrorKind::DegenerateAnchors, "linearized system is singular");
  z = polish(a, z);

  for (std::size_t i = 0; i < a.anchors.size(); ++i) {
    const double miss = std::abs(distance(z, a.anchors[i]) - a.distances[i]);
    if (miss > res_tol * (1.0 + a.distances[i])) {
      throw MathError(MathErrorKind::Infeasible,
                      "distance to anchor " + std::to_string(i) + " misses by " + std::to_string(miss));
    }
  }
  return z;
}

bool equidistance_collapse(const Point& p, const Point& q, const PointSet& anchors, double tol,
                           double rtol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  if (anchors.empty()) throw MathError(MathErrorKind::DegenerateAnchors, "no anchors");
  if (anchors.size() > static_cast<std::size_t>(anchors.front().size()) + 1 ||
      !affinely_independent(anchors, rtol)) {
    throw MathError(MathErrorKind::DegenerateAnchors, "anchors are not affinely independent");
  }
  for (const auto& a : anchors) {
    if (std::abs(distance(p, a) - distance(q, a)) > tol) return false;
  }
  return true;
}

}  // namespace aeiso
