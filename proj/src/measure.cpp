#include "aeiso/measure.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aeiso/errors.hpp"

namespace aeiso {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t engine_seed) : engine_(engine_seed) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % n;
}

Point Rng::normal_vector(std::size_t d) {
  Point g(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal();
  return g;
}

Point Rng::unit_vector(std::size_t d) {
  for (;;) {
    Point g = normal_vector(d);
    const double n = g.norm();
    if (n > 1e-300) return g / n;
  }
}

Matrix random_orthogonal(Rng& rng, std::size_t d) {
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

EuclideanIsometry random_isometry(Rng& rng, std::size_t d) {
  Matrix q = random_orthogonal(rng, d);
  return {std::move(q), rng.normal_vector(d)};
}

// ---------------------------------------------------------------------------

namespace {

struct DimensionOf {
  std::size_t operator()(const GaussianParams& p) const { return p.mean.size(); }
  std::size_t operator()(const UniformBoxParams& p) const { return p.lower.size(); }
  std::size_t operator()(const MixtureParams& p) const {
    return p.components.empty() ? 0 : p.components.front().mean.size();
  }
  std::size_t operator()(const HyperplaneParams& p) const { return p.normal.size(); }
};

/// Symmetric square root of a PSD covariance: cov = F F^T.
Matrix covariance_factor(const Matrix& cov) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  Point lambda = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
}

void validate_gaussian(const GaussianParams& g, std::size_t d) {
  if (static_cast<std::size_t>(g.mean.size()) != d) throw DimensionMismatch(d, g.mean.size());
  if (g.covariance.rows() != g.mean.size() || g.covariance.cols() != g.mean.size()) {
    throw std::invalid_argument("covariance must be d x d");
  }
  if (!g.mean.allFinite() || !g.covariance.allFinite()) {
    throw std::invalid_argument("gaussian parameters must be finite");
  }
  if ((g.covariance - g.covariance.transpose()).norm() > 1e-12 * (1.0 + g.covariance.norm())) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(g.covariance);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance is not positive semidefinite");
  }
}

struct Validator {
  std::size_t d;
  void operator()(const GaussianParams& p) const { validate_gaussian(p, d); }
  void operator()(const UniformBoxParams& p) const {
    if (static_cast<std::size_t>(p.upper.size()) != d) throw DimensionMismatch(d, p.upper.size());
    if (!p.lower.allFinite() || !p.upper.allFinite()) throw std::invalid_argument("box bounds must be finite");
    if (!(p.lower.array() < p.upper.array()).all()) {
      throw std::invalid_argument("box needs lower < upper in every coordinate");
    }
  }
  void operator()(const MixtureParams& p) const {
    if (p.components.empty() || p.components.size() != p.weights.size()) {
      throw std::invalid_argument("mixture needs one weight per component");
    }
    double total = 0.0;
    for (double w : p.weights) {
      if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("mixture weights must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
    for (const auto& c : p.components) validate_gaussian(c, d);
  }
  void operator()(const HyperplaneParams& p) const {
    if (!p.normal.allFinite() || !(p.normal.norm() > 0.0)) {
      throw std::invalid_argument("hyperplane normal must be finite and non-zero");
    }
    if (!std::isfinite(p.offset) || !std::isfinite(p.spread) || !(p.spread > 0.0)) {
      throw std::invalid_argument("hyperplane offset must be finite and spread positive");
    }
  }
};

struct Sampler {
  Rng& rng;
  std::size_t n;

  PointSet operator()(const GaussianParams& p) const {
    const Matrix f = covariance_factor(p.covariance);
    PointSet out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(p.mean + f * rng.normal_vector(p.mean.size()));
    return out;
  }
  PointSet operator()(const UniformBoxParams& p) const {
    PointSet out;
    out.reserve(n);
    const Point width = p.upper - p.lower;
    for (std::size_t i = 0; i < n; ++i) {
      Point x(p.lower.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = p.lower[k] + width[k] * rng.uniform();
      out.push_back(std::move(x));
    }
    return out;
  }
  PointSet operator()(const MixtureParams& p) const {
    std::vector<Matrix> factors;
    for (const auto& c : p.components) factors.push_back(covariance_factor(c.covariance));
    PointSet out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      std::size_t k = 0;
      double acc = p.weights[0];
      while (u >= acc && k + 1 < p.weights.size()) acc += p.weights[++k];
      const auto& c = p.components[k];
      out.push_back(c.mean + factors[k] * rng.normal_vector(c.mean.size()));
    }
    return out;
  }
  PointSet operator()(const HyperplaneParams& p) const {
    const double scale = p.normal.norm();
    const Point unit = p.normal / scale;
    const Point foot = (p.offset / scale) * unit;
    PointSet out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Point g = p.spread * rng.normal_vector(unit.size());
      out.push_back(foot + (g - unit.dot(g) * unit));
    }
    return out;
  }
};

}  // namespace

MeasureModel MeasureModel::standard_gaussian(std::size_t d, std::uint64_t seed) {
  return {GaussianParams{Point::Zero(d), Matrix::Identity(d, d)}, seed};
}

MeasureModel MeasureModel::unit_box(std::size_t d, std::uint64_t seed) {
  return {UniformBoxParams{Point::Zero(d), Point::Ones(d)}, seed};
}

std::size_t MeasureModel::dimension() const { return std::visit(DimensionOf{}, params); }

void MeasureModel::validate() const {
  const std::size_t d = dimension();
  require_dimension(d);
  std::visit(Validator{d}, params);
}

std::string_view kind_name(const MeasureParams& params) {
  switch (params.index()) {
    case 0:
      return "gaussian";
    case 1:
      return "uniform-box";
    case 2:
      return "gaussian-mixture";
    default:
      return "hyperplane";
  }
}

PointSet sample(const MeasureModel& m, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  m.validate();
  Rng rng = Rng::substream(m.seed, Stream::Sample);
  return std::visit(Sampler{rng, n}, m.params);
}

bool check_full_dimensional(const PointSet& samples, double rtol) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const auto d = static_cast<std::size_t>(samples.front().size());
  if (samples.size() < d + 1) {
    throw std::invalid_argument("full dimension needs at least d+1 = " + std::to_string(d + 1) +
                                " samples, got " + std::to_string(samples.size()));
  }
  return affine_dimension(samples, rtol) == d;
}

// ---------------------------------------------------------------------------

std::string_view kind_name(const Corruption& c) {
  switch (c.index()) {
    case 0:
      return "none";
    case 1:
      return "point-fraction";
    default:
      return "slab";
  }
}

void CorruptedMap::validate() const {
  const std::size_t d = base.dimension();
  if (const auto* pf = std::get_if<PointFraction>(&corruption)) {
    if (!(pf->epsilon >= 0.0 && pf->epsilon < 1.0)) throw std::invalid_argument("epsilon must be in [0, 1)");
    if (!(pf->displacement > 0.0) || !std::isfinite(pf->displacement)) {
      throw std::invalid_argument("displacement must be positive");
    }
  } else if (const auto* s = std::get_if<Slab>(&corruption)) {
    if (static_cast<std::size_t>(s->normal.size()) != d) throw DimensionMismatch(d, s->normal.size());
    if (!s->normal.allFinite() || !(s->normal.norm() > 0.0)) throw std::invalid_argument("slab normal must be non-zero");
    if (!(s->thickness >= 0.0) || !std::isfinite(s->thickness) || !std::isfinite(s->offset)) {
      throw std::invalid_argument("slab thickness must be >= 0");
    }
    if (!(s->displacement > 0.0) || !std::isfinite(s->displacement)) {
      throw std::invalid_argument("displacement must be positive");
    }
  }
}

std::size_t corrupted_count(double epsilon, std::size_t n) {
  return static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n) + 1e-9));
}

bool in_slab(const Slab& slab, const Point& x) {
  if (x.size() != slab.normal.size()) throw DimensionMismatch(slab.normal.size(), x.size());
  const double scale = slab.normal.norm();
  return std::abs(slab.normal.dot(x) / scale - slab.offset / scale) <= 0.5 * slab.thickness;
}

CorruptedImages apply_corrupted(const CorruptedMap& map, const PointSet& xs) {
  map.validate();
  const std::size_t d = map.base.dimension();
  require_uniform_dimension(xs, d);

  CorruptedImages out;
  out.images.reserve(xs.size());
  for (const auto& x : xs) out.images.push_back(map.base.apply(x));
  out.corrupted.assign(xs.size(), false);

  double displacement = 0.0;
  if (const auto* pf = std::get_if<PointFraction>(&map.corruption)) {
    displacement = pf->displacement;
    const std::size_t k = corrupted_count(pf->epsilon, xs.size());
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::substream(map.seed, Stream::CorruptionSelect);
    // Partial Fisher-Yates: the first k slots are a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(xs.size() - i)]);
    for (std::size_t i = 0; i < k; ++i) out.corrupted[order[i]] = true;
  } else if (const auto* s = std::get_if<Slab>(&map.corruption)) {
    displacement = s->displacement;
    for (std::size_t i = 0; i < xs.size(); ++i) out.corrupted[i] = in_slab(*s, xs[i]);
  }

  Rng rng = Rng::substream(map.seed, Stream::Displacement);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (out.corrupted[i]) out.images[i] += displacement * rng.unit_vector(d);
  }
  return out;
}

void CorrespondenceSet::validate() const {
  if (x.size() != y.size()) throw std::invalid_argument("correspondence x/y length mismatch");
  require_dimension(dimension);
  require_uniform_dimension(x, dimension);
  require_uniform_dimension(y, dimension);
}

GeneratedData make_correspondences(const MeasureModel& m, const CorruptedMap& map, std::size_t n) {
  if (m.dimension() != map.base.dimension()) throw DimensionMismatch(m.dimension(), map.base.dimension());
  GeneratedData out;
  out.correspondences.dimension = m.dimension();
  if (n == 0) {
    m.validate();
    map.validate();
    return out;
  }
  PointSet xs = sample(m, n);
  CorruptedImages ci = apply_corrupted(map, xs);
  out.correspondences.x = std::move(xs);
  out.correspondences.y = std::move(ci.images);
  out.corrupted = std::move(ci.corrupted);
  return out;
}

}  // namespace aeiso
