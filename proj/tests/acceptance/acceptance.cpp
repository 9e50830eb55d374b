// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "aeiso/certifier.hpp"
#include "aeiso/errors.hpp"
#include "aeiso/extension.hpp"
#include "aeiso/io.hpp"
#include "aeiso/trilateration.hpp"
#include "oracles.hpp"

using namespace aeiso;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

bool close_to(const EuclideanIsometry& got, const EuclideanIsometry& want, double tol) {
  return (got.linear() - want.linear()).norm() <= tol &&
         (got.translation() - want.translation()).norm() <= tol * (1.0 + want.translation().norm());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(AEISO_CLI_PATH) + " " + args + " > acc_stdout.txt 2> acc_stderr.txt";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp("acc_stdout.txt"), slurp("acc_stderr.txt")};
}

void write_pairs(const std::string& path, const CorrespondenceSet& cs) {
  std::ofstream out(path, std::ios::binary);
  write_correspondences(out, cs);
}

Outcome extension_round_trip() {
  Rng rng(101);
  std::size_t worst_d = 0;
  double worst = 0.0;
  std::size_t failures = 0;
  for (std::size_t d = 1; d <= 8; ++d) {
    for (int trial = 0; trial < 1000; ++trial) {
      const EuclideanIsometry h = testing::random_test_isometry(rng, d);
      const PointSet src = testing::random_simplex_points(rng, d);
      const Extension e = extend_finite_isometry(LabeledSimplex(src, testing::map_points(h, src)));
      const double err = (e.isometry.linear() - h.linear()).norm();
      if (err > worst) {
        worst = err;
        worst_d = d;
      }
      if (!close_to(e.isometry, h, 1e-9)) ++failures;
    }
  }
  std::ostringstream msg;
  msg << "8000 simplices, " << failures << " outside 1e-9, worst ||dQ||_F " << worst << " (d=" << worst_d << ")";
  return {failures == 0, msg.str()};
}

Outcome polarization_and_gram() {
  Rng rng(202);
  std::size_t bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::size_t d = 1 + rng.below(8);
    const Point x = rng.normal_vector(d);
    const Point y = rng.normal_vector(d);
    const double bound = 1e-12 * std::max(1.0, x.norm() * y.norm());
    if (std::abs(inner_by_polarization(x, y) - inner_product(x, y)) > bound) ++bad;
  }
  std::size_t gram_wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = 1 + rng.below(8);
    const PointSet src = testing::random_simplex_points(rng, d);
    const EuclideanIsometry h = testing::random_test_isometry(rng, d);
    PointSet scaled;
    for (const auto& p : src) scaled.push_back(2.0 * p);
    if (!verify_gram_equality(LabeledSimplex(src, testing::map_points(h, src)), 1e-9)) ++gram_wrong;
    if (verify_gram_equality(LabeledSimplex(src, scaled), 1e-9)) ++gram_wrong;
  }
  std::ostringstream msg;
  msg << "polarization misses " << bad << "/100000, gram misclassified " << gram_wrong << "/2000";
  return {bad == 0 && gram_wrong == 0, msg.str()};
}

/// Reflection of p through the hyperplane spanned by d anchors in R^d.
Point mirror(const Point& p, const PointSet& anchors) {
  const std::size_t d = anchors.size();
  Matrix edges(d, d - 1);
  for (std::size_t i = 1; i < d; ++i) edges.col(static_cast<Eigen::Index>(i - 1)) = anchors[i] - anchors[0];
  Point normal;
  if (d == 1) {
    normal = Point::Ones(1);
  } else {
    Eigen::JacobiSVD<Matrix> svd(edges, Eigen::ComputeFullU);
    normal = svd.matrixU().col(static_cast<Eigen::Index>(d - 1));
  }
  return p - 2.0 * normal * normal.dot(p - anchors[0]);
}

Outcome trilateration_round_trip() {
  Rng rng(303);
  std::size_t failures = 0;
  for (std::size_t d = 1; d <= 8; ++d) {
    for (int trial = 0; trial < 1000; ++trial) {
      const PointSet anchors = testing::random_simplex_points(rng, d);
      const Point z = rng.normal_vector(d);
      const Point found = locate(AnchorSet(anchors, distances_to(anchors, z)));
      if ((found - z).norm() > 1e-9 * (1.0 + z.norm())) ++failures;
    }
  }
  // With only d anchors a point and its mirror image share every distance.
  std::size_t mirror_misses = 0;
  for (std::size_t d = 1; d <= 8; ++d) {
    PointSet anchors = testing::random_simplex_points(rng, d);
    anchors.pop_back();
    const Point p = rng.normal_vector(d) + 3.0 * Point::Ones(static_cast<Eigen::Index>(d));
    const Point q = mirror(p, anchors);
    if ((p - q).norm() < 1e-3 || !equidistance_collapse(p, q, anchors, 1e-9)) ++mirror_misses;
  }
  std::ostringstream msg;
  msg << failures << "/8000 round trips outside 1e-9(1+|z|), " << mirror_misses << "/8 mirror pairs separated";
  return {failures == 0 && mirror_misses == 0, msg.str()};
}

Outcome null_set_regime() {
  std::ostringstream msg;
  bool pass = true;
  for (std::size_t d : {2u, 3u}) {
    Rng truth_rng = Rng::substream(d, Stream::GroundTruth);
    Point normal = Point::Zero(static_cast<Eigen::Index>(d));
    normal[0] = 1.0;
    const CorruptedMap map{random_isometry(truth_rng, d), Slab{normal, 0.0, 0.0, 1.0}, d};
    const GeneratedData data = make_correspondences(MeasureModel::standard_gaussian(d, 40 + d), map, 10000);
    const Recovery r = recover_oracle(data.correspondences, RecoveryConfig{});
    const CertificationReport report = certify(data.correspondences, RecoveryConfig{});
    const bool ok = close_to(r.isometry, map.base, 1e-9) && report.recovered && report.violation_rate_hat == 0.0;
    pass = pass && ok;
    msg << "d=" << d << " dQ=" << (r.isometry.linear() - map.base.linear()).norm()
        << " rate=" << report.violation_rate_hat << "; ";
  }
  return {pass, msg.str()};
}

Outcome robust_regime() {
  std::size_t recovered = 0;
  std::size_t covered = 0;
  const RecoveryConfig cfg;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng truth_rng = Rng::substream(seed, Stream::GroundTruth);
    const CorruptedMap map{random_isometry(truth_rng, 3), PointFraction{0.05, 1.0}, seed};
    const GeneratedData data = make_correspondences(MeasureModel::standard_gaussian(3, seed), map, 1000);
    const CertificationReport report = certify(data.correspondences, cfg);
    if (report.recovered && close_to(*report.recovered, map.base, 1e-6)) ++recovered;
    if (report.confidence_interval.low <= 0.05 && 0.05 <= report.confidence_interval.high) ++covered;
  }
  std::ostringstream msg;
  msg << "recovered " << recovered << "/100 (need 99), interval covers 0.05 in " << covered << "/100 (need 90)";
  return {recovered >= 99 && covered >= 90, msg.str()};
}

Outcome brute_force_equivalence() {
  Rng rng(505);
  RecoveryConfig cfg;
  std::size_t mismatches = 0;
  for (int instance = 0; instance < 500; ++instance) {
    const std::size_t d = 1 + rng.below(3);
    const std::size_t n = d + 1 + rng.below(8 - d);
    const double eps = 0.3 * rng.uniform();
    Rng truth_rng = Rng::substream(instance, Stream::GroundTruth);
    const CorruptedMap map{random_isometry(truth_rng, d), PointFraction{eps, 1.0}, static_cast<std::uint64_t>(instance)};
    const GeneratedData data = make_correspondences(MeasureModel::standard_gaussian(d, 7000 + instance), map, n);
    cfg.seed = static_cast<std::uint64_t>(instance);
    if (best_consensus(data.correspondences, cfg).inlier_count !=
        testing::brute_force_best_consensus(data.correspondences, cfg)) {
      ++mismatches;
    }
  }
  std::ostringstream msg;
  msg << mismatches << "/500 instances disagree with exhaustive search";
  return {mismatches == 0, msg.str()};
}

Outcome negative_controls() {
  std::ostringstream msg;
  bool pass = true;

  const CliRun gen = cli("generate --d 3 --n 400 --measure hyperplane --out acc_flat.jsonl --seed 9");
  const CliRun flat = cli("certify --input acc_flat.jsonl");
  bool flat_ok = gen.code == 0 && flat.code == 0;
  if (flat_ok) {
    const json report = json::parse(flat.out);
    flat_ok = report["support_dimension"].get<int>() < 3 && report["recovered"].is_null();
  }
  msg << "hyperplane " << (flat_ok ? "flagged" : "MISSED") << "; ";
  pass = pass && flat_ok;

  CorrespondenceSet quad;
  quad.dimension = 2;
  quad.x = sample(MeasureModel::standard_gaussian(2, 17), 300);
  for (const auto& x : quad.x) {
    Point y = x;
    y[0] += 0.5 * x.squaredNorm();
    quad.y.push_back(y);
  }
  write_pairs("acc_quad.jsonl", quad);
  const CliRun q = cli("recover --input acc_quad.jsonl");
  const bool quad_ok = q.code == 3 && q.err.find("NoConsensus") != std::string::npos;
  msg << "quadratic exit " << q.code << "; ";
  pass = pass && quad_ok;

  std::ofstream("acc_scaled.json") << R"({"source":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]],"images":[[0,0,0],[2,0,0],[0,2,0],[0,0,2]]})";
  const CliRun s = cli("extend --input acc_scaled.json");
  const bool scaled_ok = s.code == 3 && s.err.find("NotDistancePreserving") != std::string::npos;
  msg << "scaled exit " << s.code;
  pass = pass && scaled_ok;
  return {pass, msg.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"extension round trip, d=1..8", 10.0, extension_round_trip},
      {"polarization identity and Gram equality", 5.0, polarization_and_gram},
      {"trilateration round trip and mirror ambiguity", 5.0, trilateration_round_trip},
      {"null-set corruption is invisible", 10.0, null_set_regime},
      {"robust recovery at eps=0.05", 60.0, robust_regime},
      {"consensus equals exhaustive search", 30.0, brute_force_equivalence},
      {"negative controls end to end", 10.0, negative_controls},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s  %-48s %7.2fs / %4.0fs  %s\n", pass ? "PASS" : "FAIL", c.name.c_str(), seconds, c.budget_seconds,
                outcome.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
