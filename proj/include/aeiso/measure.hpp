#pragma once

// Synthetic measures and almost-everywhere isometric maps.
//
// Random streams
// --------------
// All randomness comes from std::mt19937_64. An operation never draws from a
// caller's generator; it opens its own substream
//
//     engine seed = splitmix64(seed + 0x9E3779B97F4A7C15 * (stream + 1))
//
// with one fixed stream id per operation (see `Stream`). Uniform reals are
// (u64 >> 11) * 2^-53 and normals come from the Marsaglia polar method, so the
// float streams do not depend on the standard library's distributions.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "aeiso/geometry.hpp"
#include "aeiso/isometry.hpp"

namespace aeiso {

enum class Stream : std::uint64_t {
  Sample = 1,
  CorruptionSelect = 2,
  Displacement = 3,
  GroundTruth = 4,
  /// Consensus trial t uses stream RansacBase + t.
  RansacBase = 1000,
};

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t engine_seed);
  static Rng substream(std::uint64_t seed, std::uint64_t stream);
  static Rng substream(std::uint64_t seed, Stream stream) {
    return substream(seed, static_cast<std::uint64_t>(stream));
  }

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  Point normal_vector(std::size_t d);
  /// Uniform direction on the unit sphere S^{d-1}.
  Point unit_vector(std::size_t d);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-distributed element of O(d): QR of a Gaussian matrix with the sign of
/// diag(R) folded into Q.
Matrix random_orthogonal(Rng& rng, std::size_t d);
/// random_orthogonal with a standard Gaussian translation.
EuclideanIsometry random_isometry(Rng& rng, std::size_t d);

// ---------------------------------------------------------------------------
// Measures

struct GaussianParams {
  Point mean;
  Matrix covariance;
};

struct UniformBoxParams {
  Point lower;
  Point upper;
};

struct MixtureParams {
  std::vector<double> weights;
  std::vector<GaussianParams> components;
};

/// Gaussian of scale `spread` restricted to {x : <normal, x> = offset}.
struct HyperplaneParams {
  Point normal;
  double offset = 0.0;
  double spread = 1.0;
};

using MeasureParams = std::variant<GaussianParams, UniformBoxParams, MixtureParams, HyperplaneParams>;

struct MeasureModel {
  MeasureParams params;
  std::uint64_t seed = 0;

  static MeasureModel standard_gaussian(std::size_t d, std::uint64_t seed);
  static MeasureModel unit_box(std::size_t d, std::uint64_t seed);

  std::size_t dimension() const;
  /// Throws std::invalid_argument on a covariance that is not PSD, mixture
  /// weights that do not sum to one, an empty box or a zero normal.
  void validate() const;
};

std::string_view kind_name(const MeasureParams& params);

/// n >= 1 points; bit-identical for identical model and seed.
PointSet sample(const MeasureModel& m, std::size_t n);

/// affine_dimension(samples) == d. Requires at least d+1 samples.
bool check_full_dimensional(const PointSet& samples, double rtol = kDefaultRankRtol);

// ---------------------------------------------------------------------------
// Corrupted maps

struct NoCorruption {};

/// Exactly floor(epsilon * n) of n points are displaced.
struct PointFraction {
  double epsilon = 0.0;
  double displacement = 1.0;
};

/// Points with |<n̂, x> - offset / |n|| <= thickness / 2 are displaced.
/// Thickness 0 is a hyperplane: a null set under any continuous measure.
struct Slab {
  Point normal;
  double offset = 0.0;
  double thickness = 0.0;
  double displacement = 1.0;
};

using Corruption = std::variant<NoCorruption, PointFraction, Slab>;

struct CorruptedMap {
  EuclideanIsometry base;
  Corruption corruption = NoCorruption{};
  std::uint64_t seed = 0;

  void validate() const;
};

std::string_view kind_name(const Corruption& c);

/// floor(epsilon * n), robust to epsilon*n landing just under an integer.
std::size_t corrupted_count(double epsilon, std::size_t n);

bool in_slab(const Slab& slab, const Point& x);

struct CorruptedImages {
  PointSet images;
  std::vector<bool> corrupted;
};

/// Images of `xs` under the map. Clean points map through `base`; corrupted
/// ones land uniformly on a sphere of radius `displacement` around the true
/// image. Point-fraction selection depends on the batch size, so the map is
/// applied to a whole batch at once.
CorruptedImages apply_corrupted(const CorruptedMap& map, const PointSet& xs);

struct CorrespondenceSet {
  std::size_t dimension = 0;
  PointSet x;
  PointSet y;

  std::size_t size() const { return x.size(); }
  /// Throws std::invalid_argument unless x and y have equal length and
  /// every point has `dimension` coordinates.
  void validate() const;
};

struct GeneratedData {
  CorrespondenceSet correspondences;
  /// Ground truth: corrupted[i] iff y_i was displaced.
  std::vector<bool> corrupted;
};

GeneratedData make_correspondences(const MeasureModel& m, const CorruptedMap& map, std::size_t n);

}  // namespace aeiso
