#pragma once

#include <cstddef>
#include <string>

#include "aeiso/geometry.hpp"

namespace aeiso {

inline constexpr double kDefaultIsometryTol = 1e-9;

struct ValidityReport {
  bool valid = false;
  /// ||Q^T Q - I||_F
  double orthogonality_defect = 0.0;
  double determinant = 0.0;
};

/// The affine map x -> Qx + b.
///
/// Stored in normalized form: an anchored map Q(x - a0) + f(a0) is held as
/// b = f(a0) - Q a0. Construction checks shapes and finiteness only; use
/// is_valid() to test orthogonality. Everything in this library that
/// produces an isometry guarantees Q^T Q = I to within 1e-9.
class EuclideanIsometry {
 public:
  EuclideanIsometry(Matrix q, Point b);

  static EuclideanIsometry identity(std::size_t d);
  static EuclideanIsometry translation(const Point& t);
  static EuclideanIsometry from_anchor(const Matrix& q, const Point& anchor,
                                       const Point& anchor_image);

  std::size_t dimension() const { return static_cast<std::size_t>(b_.size()); }
  const Matrix& linear() const { return q_; }
  const Point& translation() const { return b_; }

  Point apply(const Point& x) const;

 private:
  Matrix q_;
  Point b_;
};

inline Point apply(const EuclideanIsometry& h, const Point& x) { return h.apply(x); }

/// x -> outer(inner(x)).
EuclideanIsometry compose(const EuclideanIsometry& outer, const EuclideanIsometry& inner);

/// Q^T x - Q^T b. Assumes h is orthogonal; it does not invert a general matrix.
EuclideanIsometry inverse(const EuclideanIsometry& h);

ValidityReport is_valid(const EuclideanIsometry& h, double tol = kDefaultIsometryTol);

/// ||Q1 - Q2||_F <= tol and ||b1 - b2|| <= tol * (1 + ||b1||).
bool approx_equal(const EuclideanIsometry& a, const EuclideanIsometry& b,
                  double tol = kDefaultIsometryTol);

/// {"d": d, "Q": [row-major d*d], "b": [d]} with 17 significant digits.
std::string to_json(const EuclideanIsometry& h);
EuclideanIsometry isometry_from_json(const std::string& text);

}  // namespace aeiso
