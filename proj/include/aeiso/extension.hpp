#pragma once

// Extension of a distance-preserving labelling of a d-simplex to the unique
// global isometry agreeing with it on the vertices.

#include <cstddef>

#include "aeiso/geometry.hpp"
#include "aeiso/isometry.hpp"

namespace aeiso {

inline constexpr double kDefaultPairTol = 1e-9;
/// Largest polar-decomposition correction accepted before the extension is
/// declared numerically unreliable.
inline constexpr double kMaxOrthogonalRepair = 1e-6;

/// d+1 affinely independent vertices in R^d.
class Simplex {
 public:
  /// Throws MathError(DegenerateSimplex) unless `vertices` holds exactly d+1
  /// affinely independent points of a common dimension d.
  explicit Simplex(PointSet vertices, double rtol = kDefaultRankRtol);

  std::size_t dimension() const { return static_cast<std::size_t>(vertices_.front().size()); }
  const PointSet& vertices() const { return vertices_; }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }
  std::size_t size() const { return vertices_.size(); }

 private:
  PointSet vertices_;
};

/// Source vertices a_0..a_d with their observed images f(a_0)..f(a_d).
/// Only shape is checked on construction; the source is not required to be
/// independent here so that the extension can report DegenerateSimplex.
struct LabeledSimplex {
  LabeledSimplex(PointSet source, PointSet images);

  std::size_t dimension() const { return static_cast<std::size_t>(source.front().size()); }

  PointSet source;
  PointSet images;
};

struct PairDefect {
  bool preserving = true;
  std::size_t i = 0;
  std::size_t j = 0;
  /// | ||f(a_i) - f(a_j)|| - ||a_i - a_j|| | for the worst pair.
  double defect = 0.0;
};

/// Every pair must satisfy defect <= pair_tol * (1 + ||a_i - a_j||). The
/// reported worst pair is the one with the largest relative defect.
PairDefect check_distance_preserving(const LabeledSimplex& ls, double pair_tol = kDefaultPairTol);

/// ||V^T V - W^T W||_F <= tol * (1 + ||V^T V||_F), with v_i = a_i - a_0 and
/// w_i = f(a_i) - f(a_0).
bool verify_gram_equality(const LabeledSimplex& ls, double tol);

struct Extension {
  EuclideanIsometry isometry;
  /// ||Q_raw - Q||_F of the polar projection onto O(d).
  double repair = 0.0;
};

/// Solves Q V = W for the linear part, projects it onto O(d) and anchors the
/// translation at a_0.
///
/// Errors: DegenerateSimplex, NotDistancePreserving, NumericalFailure.
Extension extend_finite_isometry(const LabeledSimplex& ls, double rtol = kDefaultRankRtol,
                                 double pair_tol = kDefaultPairTol);

/// Nearest orthogonal matrix in the Frobenius norm (U V^T of the SVD).
Matrix nearest_orthogonal(const Matrix& m);

}  // namespace aeiso
