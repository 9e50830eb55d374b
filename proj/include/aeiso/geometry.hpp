#pragma once

// Dimension-generic vector primitives and affine predicates.
//
// Points are dense Eigen vectors whose length is the runtime dimension d.
// Every function here is pure and safe to call concurrently.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace aeiso {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointSet = std::vector<Point>;

inline constexpr std::size_t kMaxDimension = 64;
inline constexpr double kDefaultRankRtol = 1e-8;

/// Throws std::invalid_argument unless 1 <= d <= kMaxDimension.
void require_dimension(std::size_t d);
/// Throws std::invalid_argument if any coordinate is NaN or infinite.
void require_finite(const Point& x);
/// Throws DimensionMismatch unless every point has dimension d.
void require_uniform_dimension(std::span<const Point> points, std::size_t d);

double inner_product(const Point& x, const Point& y);

/// <x,y> recovered from norms alone: (|x|^2 + |y|^2 - |x-y|^2) / 2.
double inner_by_polarization(const Point& x, const Point& y);

double distance(const Point& x, const Point& y);

/// Columns p_i - p_0 for i = 1..k.
Matrix edge_matrix(std::span<const Point> points);

/// True iff the edge matrix has sigma_min > rtol * sigma_max. A single point
/// is trivially independent. Requires 1 <= |points| <= d+1 and rtol > 0.
bool affinely_independent(std::span<const Point> points, double rtol = kDefaultRankRtol);

/// Numerical rank of the mean-centred point matrix, relative threshold rtol.
std::size_t affine_dimension(std::span<const Point> points, double rtol = kDefaultRankRtol);

/// V^T V for the columns of V.
Matrix gram_matrix(const Matrix& vectors);

}  // namespace aeiso
