#include "aeiso/isometry.hpp"

#include <stdexcept>

#include "aeiso/errors.hpp"
#include "aeiso/format.hpp"

namespace aeiso {

EuclideanIsometry::EuclideanIsometry(Matrix q, Point b) : q_(std::move(q)), b_(std::move(b)) {
  require_dimension(static_cast<std::size_t>(b_.size()));
  if (q_.rows() != b_.size() || q_.cols() != b_.size()) {
    throw DimensionMismatch(b_.size(), q_.rows() == b_.size() ? q_.cols() : q_.rows());
  }
  if (!q_.allFinite() || !b_.allFinite()) {
    throw std::invalid_argument("isometry has non-finite entries");
  }
}

EuclideanIsometry EuclideanIsometry::identity(std::size_t d) {
  return {Matrix::Identity(d, d), Point::Zero(d)};
}

EuclideanIsometry EuclideanIsometry::translation(const Point& t) {
  return {Matrix::Identity(t.size(), t.size()), t};
}

EuclideanIsometry EuclideanIsometry::from_anchor(const Matrix& q, const Point& anchor,
                                                 const Point& anchor_image) {
  if (anchor.size() != anchor_image.size()) throw DimensionMismatch(anchor.size(), anchor_image.size());
  return {q, anchor_image - q * anchor};
}

Point EuclideanIsometry::apply(const Point& x) const {
  if (x.size() != b_.size()) throw DimensionMismatch(b_.size(), x.size());
  return q_ * x + b_;
}

EuclideanIsometry compose(const EuclideanIsometry& outer, const EuclideanIsometry& inner) {
  if (outer.dimension() != inner.dimension()) {
    throw DimensionMismatch(outer.dimension(), inner.dimension());
  }
  return {outer.linear() * inner.linear(), outer.linear() * inner.translation() + outer.translation()};
}

EuclideanIsometry inverse(const EuclideanIsometry& h) {
  const Matrix qt = h.linear().transpose();
  return {qt, -(qt * h.translation())};
}

ValidityReport is_valid(const EuclideanIsometry& h, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto d = static_cast<Eigen::Index>(h.dimension());
  ValidityReport r;
  r.orthogonality_defect = (h.linear().transpose() * h.linear() - Matrix::Identity(d, d)).norm();
  r.determinant = h.linear().determinant();
  r.valid = r.orthogonality_defect <= tol;
  return r;
}

bool approx_equal(const EuclideanIsometry& a, const EuclideanIsometry& b, double tol) {
  if (a.dimension() != b.dimension()) return false;
  return (a.linear() - b.linear()).norm() <= tol &&
         (a.translation() - b.translation()).norm() <= tol * (1.0 + a.translation().norm());
}

std::string to_json(const EuclideanIsometry& h) {
  return "{\"d\":" + std::to_string(h.dimension()) + ",\"Q\":" + format_row_major(h.linear()) +
         ",\"b\":" + format_array(h.translation()) + "}";
}

EuclideanIsometry isometry_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("isometry JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("d") || !doc["d"].is_number_integer()) {
    throw ParseError(0, "isometry JSON needs an integer field \"d\"");
  }
  const auto d = doc["d"].get<long long>();
  if (d < 1 || d > static_cast<long long>(kMaxDimension)) throw ParseError(0, "isometry dimension out of range");
  const auto n = static_cast<std::size_t>(d);
  if (!doc.contains("Q") || !doc.contains("b")) throw ParseError(0, "isometry JSON needs \"Q\" and \"b\"");
  const Point flat = point_from_json(doc["Q"], n * n);
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q(i, j) = flat[static_cast<Eigen::Index>(i * n + j)];
  }
  return {q, point_from_json(doc["b"], n)};
}

}  // namespace aeiso
