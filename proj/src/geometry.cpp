#include "aeiso/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "aeiso/errors.hpp"

namespace aeiso {

void require_dimension(std::size_t d) {
  if (d < 1 || d > kMaxDimension) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDimension) +
                                "], got " + std::to_string(d));
  }
}

void require_finite(const Point& x) {
  if (!x.allFinite()) throw std::invalid_argument("point has non-finite coordinates");
}

void require_uniform_dimension(std::span<const Point> points, std::size_t d) {
  for (const auto& p : points) {
    if (static_cast<std::size_t>(p.size()) != d) throw DimensionMismatch(d, p.size());
  }
}

namespace {

void require_same(const Point& x, const Point& y) {
  if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
}

}  // namespace

double inner_product(const Point& x, const Point& y) {
  require_same(x, y);
  return x.dot(y);
}

double inner_by_polarization(const Point& x, const Point& y) {
  require_same(x, y);
  return 0.5 * (x.squaredNorm() + y.squaredNorm() - (x - y).squaredNorm());
}

double distance(const Point& x, const Point& y) {
  require_same(x, y);
  // Sum in coordinate order so that distance(x,y) == distance(y,x) bit-for-bit.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = x[i] - y[i];
    acc += t * t;
  }
  return std::sqrt(acc);
}

Matrix edge_matrix(std::span<const Point> points) {
  if (points.empty()) throw std::invalid_argument("edge_matrix of an empty point set");
  const auto d = static_cast<std::size_t>(points.front().size());
  require_uniform_dimension(points, d);
  Matrix edges(d, points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) edges.col(i - 1) = points[i] - points[0];
  return edges;
}

bool affinely_independent(std::span<const Point> points, double rtol) {
  if (!(rtol > 0.0)) throw std::invalid_argument("rtol must be positive");
  if (points.empty()) throw std::invalid_argument("affinely_independent of an empty point set");
  const auto d = static_cast<std::size_t>(points.front().size());
  if (points.size() > d + 1) {
    throw std::invalid_argument("at most d+1 points can be affinely independent in dimension " +
                                std::to_string(d));
  }
  if (points.size() == 1) return true;
  const Matrix edges = edge_matrix(points);
  const Eigen::JacobiSVD<Matrix> svd(edges);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  return smin > rtol * smax;
}

std::size_t affine_dimension(std::span<const Point> points, double rtol) {
  if (!(rtol > 0.0)) throw std::invalid_argument("rtol must be positive");
  if (points.empty()) throw std::invalid_argument("affine_dimension of an empty point set");
  const auto d = static_cast<std::size_t>(points.front().size());
  require_uniform_dimension(points, d);
  if (points.size() == 1) return 0;

  Point mean = Point::Zero(d);
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Matrix centred(points.size(), d);
  for (std::size_t i = 0; i < points.size(); ++i) centred.row(i) = (points[i] - mean).transpose();

  const Eigen::BDCSVD<Matrix> svd(centred);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rtol * sv(0)) ++rank;
  }
  return rank;
}

Matrix gram_matrix(const Matrix& vectors) {
  Matrix g = vectors.transpose() * vectors;
  // Mirror the upper triangle so the result is symmetric bit-for-bit.
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

}  // namespace aeiso
