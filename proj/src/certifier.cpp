#include "aeiso/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "aeiso/errors.hpp"
#include "aeiso/trilateration.hpp"

namespace aeiso {

void RecoveryConfig::validate() const {
  if (!(rank_rtol > 0.0) || !(pair_tol > 0.0) || !(violation_tol > 0.0)) {
    throw std::invalid_argument("recovery tolerances must be positive");
  }
  if (ransac_trials < 1) throw std::invalid_argument("ransac_trials must be at least 1");
  if (!(consensus_quorum > 0.5 && consensus_quorum <= 1.0)) {
    throw std::invalid_argument("consensus_quorum must be in (0.5, 1]");
  }
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

bool pair_valid(const CorrespondenceSet& cs, std::size_t i, std::size_t j, double tau) {
  const double dx = distance(cs.x[i], cs.x[j]);
  const double dy = distance(cs.y[i], cs.y[j]);
  return std::abs(dy - dx) <= tau * (1.0 + dx);
}

bool is_inlier(const EuclideanIsometry& h, const Point& x, const Point& y, double tau) {
  return (h.apply(x) - y).norm() <= tau * (1.0 + x.norm());
}

std::vector<bool> inlier_mask(const EuclideanIsometry& h, const CorrespondenceSet& cs, double tau) {
  std::vector<bool> mask(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) mask[i] = is_inlier(h, cs.x[i], cs.y[i], tau);
  return mask;
}

std::size_t count_inliers(const EuclideanIsometry& h, const CorrespondenceSet& cs, double tau) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) count += is_inlier(h, cs.x[i], cs.y[i], tau) ? 1 : 0;
  return count;
}

SimplexSelection select_simplex(const PointSet& samples, const PairPredicate& valid,
                                const RecoveryConfig& cfg) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return select_simplex(samples, order, valid, cfg);
}

SimplexSelection select_simplex(const PointSet& samples, std::span<const std::size_t> order,
                                const PairPredicate& valid, const RecoveryConfig& cfg) {
  if (samples.empty()) throw MathError(MathErrorKind::InsufficientData, "no samples");
  const auto d = static_cast<std::size_t>(samples.front().size());
  require_dimension(d);

  std::vector<std::size_t> chosen;
  PointSet vertices;
  chosen.reserve(d + 1);
  vertices.reserve(d + 1);
  for (const std::size_t idx : order) {
    if (chosen.size() == d + 1) break;
    const bool compatible =
        std::all_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return valid(idx, c); });
    if (!compatible) continue;
    vertices.push_back(samples[idx]);
    if (affinely_independent(vertices, cfg.rank_rtol)) {
      chosen.push_back(idx);
    } else {
      vertices.pop_back();
    }
  }
  if (chosen.size() < d + 1) {
    throw MathError(MathErrorKind::InsufficientData,
                    "found " + std::to_string(chosen.size()) + " of " + std::to_string(d + 1) +
                        " mutually valid, affinely independent points");
  }
  return {Simplex(std::move(vertices), cfg.rank_rtol), std::move(chosen)};
}

namespace {

PairPredicate data_predicate(const CorrespondenceSet& cs, double tau) {
  return [&cs, tau](std::size_t i, std::size_t j) { return pair_valid(cs, i, j, tau); };
}

Recovery extend_selection(const CorrespondenceSet& cs, const SimplexSelection& sel,
                          const RecoveryConfig& cfg) {
  PointSet images;
  for (std::size_t idx : sel.indices) images.push_back(cs.y[idx]);
  const LabeledSimplex ls(sel.simplex.vertices(), std::move(images));
  Extension ext = extend_finite_isometry(ls, cfg.rank_rtol, cfg.pair_tol);
  return {std::move(ext.isometry), sel.indices, ext.repair};
}

void require_enough(const CorrespondenceSet& cs) {
  cs.validate();
  if (cs.size() < cs.dimension + 1) {
    throw MathError(MathErrorKind::InsufficientData,
                    std::to_string(cs.size()) + " correspondences cannot fix an isometry of R^" +
                        std::to_string(cs.dimension));
  }
}

struct TrialResult {
  std::optional<Recovery> recovery;
  std::size_t inliers = 0;
};

TrialResult run_trial(const CorrespondenceSet& cs, const RecoveryConfig& cfg, std::size_t trial) {
  std::vector<std::size_t> order(cs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (trial > 0) {
    Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(Stream::RansacBase) + trial);
    rng.shuffle(order);
  }
  TrialResult out;
  try {
    const SimplexSelection sel = select_simplex(cs.x, order, data_predicate(cs, cfg.violation_tol), cfg);
    out.recovery = extend_selection(cs, sel, cfg);
  } catch (const MathError&) {
    return out;
  }
  out.inliers = count_inliers(out.recovery->isometry, cs, cfg.violation_tol);
  return out;
}

}  // namespace

Recovery recover_oracle(const CorrespondenceSet& cs, const RecoveryConfig& cfg) {
  cfg.validate();
  require_enough(cs);
  const SimplexSelection sel = select_simplex(cs.x, data_predicate(cs, cfg.violation_tol), cfg);
  return extend_selection(cs, sel, cfg);
}

Consensus best_consensus(const CorrespondenceSet& cs, const RecoveryConfig& cfg) {
  cfg.validate();
  require_enough(cs);

  std::vector<TrialResult> results(cfg.ransac_trials);
  const std::size_t workers = std::min(cfg.threads, cfg.ransac_trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < results.size(); ++t) results[t] = run_trial(cs, cfg, t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < results.size(); t += workers) results[t] = run_trial(cs, cfg, t);
      });
    }
  }

  Consensus best;
  std::optional<std::size_t> winner;
  for (std::size_t t = 0; t < results.size(); ++t) {
    if (!results[t].recovery) continue;
    ++best.successful_trials;
    if (!winner || results[t].inliers > results[*winner].inliers) winner = t;
  }
  if (winner) {
    const Recovery& r = *results[*winner].recovery;
    best.isometry = r.isometry;
    best.inlier_count = results[*winner].inliers;
    best.inliers = inlier_mask(r.isometry, cs, cfg.violation_tol);
    best.trial = *winner;
    best.simplex_indices = r.simplex_indices;
  }
  return best;
}

RobustRecovery recover_robust(const CorrespondenceSet& cs, const RecoveryConfig& cfg) {
  Consensus c = best_consensus(cs, cfg);
  const double needed = cfg.consensus_quorum * static_cast<double>(cs.size());
  if (!c.isometry || static_cast<double>(c.inlier_count) < needed) {
    throw MathError(MathErrorKind::NoConsensus,
                    "best consensus " + std::to_string(c.inlier_count) + " of " +
                        std::to_string(cs.size()) + " is below quorum " +
                        std::to_string(cfg.consensus_quorum) + " (" +
                        std::to_string(c.successful_trials) + " trials produced a candidate)");
  }
  return {std::move(*c.isometry), std::move(c.inliers), c.inlier_count, std::move(c.simplex_indices)};
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w{std::clamp(centre - half, 0.0, 1.0), std::clamp(centre + half, 0.0, 1.0)};
  // Rounding at p = 0 or 1 must not push the estimate outside its own interval.
  w.low = std::min(w.low, p);
  w.high = std::max(w.high, p);
  return w;
}

namespace {

ResidualStats summarize(std::vector<double> residuals) {
  ResidualStats s;
  if (residuals.empty()) return s;
  s.mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / static_cast<double>(residuals.size());
  std::sort(residuals.begin(), residuals.end());
  s.max = residuals.back();
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(residuals.size())));
  s.p95 = residuals[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

}  // namespace

CertificationReport certify(const CorrespondenceSet& cs, const RecoveryConfig& cfg) {
  cfg.validate();
  cs.validate();
  CertificationReport report;
  report.dimension = cs.dimension;
  report.n = cs.size();
  report.outlier_count = cs.size();
  report.confidence_interval = wilson_interval(cs.size(), cs.size());

  if (cs.size() == 0) {
    report.failure = "no correspondences";
    return report;
  }
  report.support_dimension = affine_dimension(cs.x, cfg.rank_rtol);
  if (report.support_dimension < cs.dimension) {
    report.failure = "x-samples span an affine subspace of dimension " +
                     std::to_string(report.support_dimension) + " < " + std::to_string(cs.dimension);
    return report;
  }

  std::optional<RobustRecovery> robust;
  try {
    robust = recover_robust(cs, cfg);
  } catch (const MathError& e) {
    report.failure = e.what();
    return report;
  }
  const EuclideanIsometry& h = robust->isometry;

  report.recovered = h;
  report.residuals.reserve(cs.size());
  report.inliers.reserve(cs.size());
  std::size_t violations = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double r = (h.apply(cs.x[i]) - cs.y[i]).norm();
    const bool ok = r <= cfg.violation_tol * (1.0 + cs.x[i].norm());
    report.residuals.push_back(r);
    report.inliers.push_back(ok);
    violations += ok ? 0 : 1;
  }
  report.inlier_count = cs.size() - violations;
  report.outlier_count = violations;
  report.violation_rate_hat = static_cast<double>(violations) / static_cast<double>(cs.size());
  report.confidence_interval = wilson_interval(violations, cs.size());
  report.residual_stats = summarize(report.residuals);
  return report;
}

std::vector<bool> verify_pointwise(const EuclideanIsometry& h, const CorrespondenceSet& cs,
                                   const PointSet& anchors, double tol) {
  cs.validate();
  if (anchors.size() != cs.dimension + 1 || !affinely_independent(anchors)) {
    throw MathError(MathErrorKind::DegenerateAnchors, "verification needs d+1 independent anchors");
  }
  std::vector<bool> out(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    out[i] = equidistance_collapse(cs.y[i], h.apply(cs.x[i]), anchors, tol);
  }
  return out;
}

EuclideanIsometry procrustes_fit(const CorrespondenceSet& cs, const std::vector<bool>& inliers,
                                 double rank_rtol) {
  cs.validate();
  if (inliers.size() != cs.size()) throw std::invalid_argument("inlier mask length mismatch");
  const std::size_t d = cs.dimension;
  PointSet xs;
  PointSet ys;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (inliers[i]) {
      xs.push_back(cs.x[i]);
      ys.push_back(cs.y[i]);
    }
  }
  if (xs.size() < d + 1 || affine_dimension(xs, rank_rtol) < d) {
    throw MathError(MathErrorKind::DegenerateSupport,
                    "inlier x-set of " + std::to_string(xs.size()) + " points is not full-dimensional");
  }
  Point mx = Point::Zero(d);
  Point my = Point::Zero(d);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  Matrix cross = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < xs.size(); ++i) cross += (ys[i] - my) * (xs[i] - mx).transpose();
  Matrix q = nearest_orthogonal(cross);
  return EuclideanIsometry::from_anchor(q, mx, my);
}

}  // namespace aeiso
