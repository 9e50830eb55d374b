#include "aeiso/extension.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "aeiso/errors.hpp"

namespace aeiso {

namespace {

void require_shape(const PointSet& pts, std::size_t count, const char* what) {
  if (pts.size() != count) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(count) +
                                " points, got " + std::to_string(pts.size()));
  }
}

}  // namespace

Simplex::Simplex(PointSet vertices, double rtol) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw MathError(MathErrorKind::DegenerateSimplex, "no vertices");
  const std::size_t d = dimension();
  require_dimension(d);
  require_uniform_dimension(vertices_, d);
  if (vertices_.size() != d + 1) {
    throw MathError(MathErrorKind::DegenerateSimplex,
                    "a simplex in dimension " + std::to_string(d) + " needs " +
                        std::to_string(d + 1) + " vertices, got " + std::to_string(vertices_.size()));
  }
  for (const auto& v : vertices_) require_finite(v);
  if (!affinely_independent(vertices_, rtol)) {
    throw MathError(MathErrorKind::DegenerateSimplex, "vertices are not affinely independent");
  }
}

LabeledSimplex::LabeledSimplex(PointSet src, PointSet imgs)
    : source(std::move(src)), images(std::move(imgs)) {
  if (source.empty()) throw std::invalid_argument("labeled simplex without vertices");
  const std::size_t d = dimension();
  require_dimension(d);
  require_shape(source, d + 1, "labeled simplex source");
  require_shape(images, d + 1, "labeled simplex images");
  require_uniform_dimension(source, d);
  require_uniform_dimension(images, d);
  for (const auto& p : source) require_finite(p);
  for (const auto& p : images) require_finite(p);
}

PairDefect check_distance_preserving(const LabeledSimplex& ls, double pair_tol) {
  if (!(pair_tol > 0.0)) throw std::invalid_argument("pair_tol must be positive");
  PairDefect worst;
  double worst_ratio = -1.0;
  const std::size_t m = ls.source.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double src = distance(ls.source[i], ls.source[j]);
      const double img = distance(ls.images[i], ls.images[j]);
      const double defect = std::abs(img - src);
      const double ratio = defect / (1.0 + src);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst.i = i;
        worst.j = j;
        worst.defect = defect;
      }
      if (defect > pair_tol * (1.0 + src)) worst.preserving = false;
    }
  }
  return worst;
}

bool verify_gram_equality(const LabeledSimplex& ls, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Matrix gv = gram_matrix(edge_matrix(ls.source));
  const Matrix gw = gram_matrix(edge_matrix(ls.images));
  return (gv - gw).norm() <= tol * (1.0 + gv.norm());
}

Matrix nearest_orthogonal(const Matrix& m) {
  const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Extension extend_finite_isometry(const LabeledSimplex& ls, double rtol, double pair_tol) {
  if (!affinely_independent(ls.source, rtol)) {
    throw MathError(MathErrorKind::DegenerateSimplex, "source vertices are not affinely independent");
  }
  const PairDefect pd = check_distance_preserving(ls, pair_tol);
  if (!pd.preserving) {
    throw MathError(MathErrorKind::NotDistancePreserving,
                    "pair (" + std::to_string(pd.i) + "," + std::to_string(pd.j) +
                        ") changes length by " + std::to_string(pd.defect));
  }

  const Matrix v = edge_matrix(ls.source);
  const Matrix w = edge_matrix(ls.images);
  // Q V = W  <=>  V^T Q^T = W^T; solved column-wise, never forming V^{-1}.
  const Eigen::ColPivHouseholderQR<Matrix> qr(v.transpose());
  if (qr.rank() < v.cols()) {
    throw MathError(MathErrorKind::NumericalFailure, "edge matrix is rank deficient in the solve");
  }
  const Matrix q_raw = qr.solve(w.transpose()).transpose();
  if (!q_raw.allFinite()) throw MathError(MathErrorKind::NumericalFailure, "non-finite linear part");

  Matrix q = nearest_orthogonal(q_raw);
  const double repair = (q_raw - q).norm();
  if (!(repair <= kMaxOrthogonalRepair)) {
    throw MathError(MathErrorKind::NumericalFailure,
                    "orthogonality repair " + std::to_string(repair) + " exceeds " +
                        std::to_string(kMaxOrthogonalRepair));
  }
  return {EuclideanIsometry::from_anchor(q, ls.source[0], ls.images[0]), repair};
}

}  // namespace aeiso
