#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aeiso/errors.hpp"
#include "aeiso/measure.hpp"

using namespace aeiso;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), p.data());
  return p;
}

bool identical(const PointSet& a, const PointSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

std::size_t count_true(const std::vector<bool>& v) { return std::count(v.begin(), v.end(), true); }

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("substreams are distinct and reproducible") {
    Rng a = Rng::substream(42, Stream::Sample);
    Rng b = Rng::substream(42, Stream::Sample);
    Rng c = Rng::substream(42, Stream::Displacement);
    const auto xa = a.next_u64();
    CHECK(xa == b.next_u64());
    CHECK(xa != c.next_u64());
    Rng u(1);
    for (int i = 0; i < 1000; ++i) {
      const double v = u.uniform();
      REQUIRE((v >= 0.0 && v < 1.0));
      REQUIRE(u.below(7) < 7);
    }
  }

  TEST_CASE("sampling is deterministic") {
    const auto m = MeasureModel::standard_gaussian(2, 42);
    const PointSet s1 = sample(m, 3);
    const PointSet s2 = sample(m, 3);
    CHECK(s1.size() == 3);
    CHECK(identical(s1, s2));
    for (const auto& p : s1) CHECK(p.allFinite());
    CHECK_FALSE(identical(s1, sample(MeasureModel::standard_gaussian(2, 43), 3)));
    CHECK_THROWS_AS(sample(m, 0), std::invalid_argument);
  }

  TEST_CASE("hyperplane-supported samples lie on the hyperplane") {
    const Point normal = pt({1, 2, -2}) / 3.0;
    const MeasureModel m{HyperplaneParams{normal, 0.75, 2.0}, 9};
    const PointSet s = sample(m, 1000);
    for (const auto& x : s) REQUIRE(std::abs(normal.dot(x) - 0.75) <= 1e-12);
    CHECK(affine_dimension(s) == 2);
    CHECK_FALSE(check_full_dimensional(s));
  }

  TEST_CASE("uniform box samples stay in the box") {
    const PointSet s = sample(MeasureModel::unit_box(2, 5), 5000);
    for (const auto& x : s) REQUIRE(((x.array() >= 0.0).all() && (x.array() <= 1.0).all()));
  }

  TEST_CASE("gaussian mixture") {
    MixtureParams mix;
    mix.weights = {0.25, 0.75};
    mix.components = {{pt({-10, 0}), Matrix::Identity(2, 2)}, {pt({10, 0}), 0.01 * Matrix::Identity(2, 2)}};
    const PointSet s = sample(MeasureModel{mix, 3}, 4000);
    const auto right = std::count_if(s.begin(), s.end(), [](const Point& x) { return x[0] > 0; });
    CHECK(right / 4000.0 == doctest::Approx(0.75).epsilon(0.05));
  }

  TEST_CASE("model validation") {
    Matrix bad(2, 2);
    bad << 1, 0, 0, -1;
    CHECK_THROWS_AS(sample(MeasureModel{GaussianParams{Point::Zero(2), bad}, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample(MeasureModel{UniformBoxParams{pt({0, 1}), pt({1, 1})}, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample(MeasureModel{MixtureParams{{0.5, 0.4}, {{Point::Zero(1), Matrix::Identity(1, 1)},
                                                                  {Point::Zero(1), Matrix::Identity(1, 1)}}},
                                        0},
                           1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample(MeasureModel{HyperplaneParams{Point::Zero(3), 0.0, 1.0}, 0}, 1), std::invalid_argument);
    // A singular but PSD covariance is a valid (degenerate) Gaussian.
    Matrix psd(2, 2);
    psd << 1, 1, 1, 1;
    CHECK(sample(MeasureModel{GaussianParams{Point::Zero(2), psd}, 0}, 10).size() == 10);
  }

  TEST_CASE("full-dimensional support") {
    CHECK(check_full_dimensional(sample(MeasureModel::standard_gaussian(2, 1), 100)));
    CHECK_FALSE(check_full_dimensional(PointSet{pt({0, 0}), pt({1, 1}), pt({2, 2}), pt({-3, -3})}));
    CHECK(check_full_dimensional(PointSet{pt({0, 0, 0}), pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1})}));
    CHECK_THROWS_AS(check_full_dimensional(PointSet{pt({0, 0}), pt({1, 0})}), std::invalid_argument);
  }

  TEST_CASE("corruption") {
    Rng rng(6);
    const EuclideanIsometry base = random_isometry(rng, 3);
    const PointSet xs = sample(MeasureModel::standard_gaussian(3, 2), 1000);

    SUBCASE("none is the base map") {
      const auto out = apply_corrupted(CorruptedMap{base, NoCorruption{}, 1}, xs);
      CHECK(count_true(out.corrupted) == 0);
      for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(out.images[i] == base.apply(xs[i]));
    }
    SUBCASE("point fraction corrupts exactly floor(eps n) points") {
      const auto out = apply_corrupted(CorruptedMap{base, PointFraction{0.05, 1.0}, 1}, xs);
      CHECK(count_true(out.corrupted) == 50);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double moved = (out.images[i] - base.apply(xs[i])).norm();
        REQUIRE(moved == doctest::Approx(out.corrupted[i] ? 1.0 : 0.0));
      }
    }
    SUBCASE("zero-thickness slab is a null set") {
      const auto out = apply_corrupted(CorruptedMap{base, Slab{pt({0, 0, 1}), 0.0, 0.0, 1.0}, 1}, xs);
      CHECK(count_true(out.corrupted) == 0);
      // Points exactly on the hyperplane are still caught.
      const auto on = apply_corrupted(CorruptedMap{base, Slab{pt({0, 0, 1}), 0.0, 0.0, 1.0}, 1},
                                      PointSet{pt({1, 2, 0}), pt({1, 2, 1e-300})});
      CHECK(on.corrupted[0]);
      CHECK_FALSE(on.corrupted[1]);
    }
    SUBCASE("thick slab") {
      const Slab slab{pt({0, 0, 2}), 0.0, 1.0, 1.0};
      const auto out = apply_corrupted(CorruptedMap{base, slab, 1}, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) REQUIRE(out.corrupted[i] == (std::abs(xs[i][2]) <= 0.5));
    }
    SUBCASE("validation") {
      CHECK_THROWS_AS(apply_corrupted(CorruptedMap{base, PointFraction{1.0, 1.0}, 1}, xs), std::invalid_argument);
      CHECK_THROWS_AS(apply_corrupted(CorruptedMap{base, Slab{pt({0, 0, 1}), 0.0, -1.0, 1.0}, 1}, xs),
                      std::invalid_argument);
    }
  }

  TEST_CASE("correspondences") {
    Rng rng(10);
    const EuclideanIsometry base = random_isometry(rng, 2);
    const auto model = MeasureModel::standard_gaussian(2, 4);

    CHECK(make_correspondences(model, CorruptedMap{base, NoCorruption{}, 1}, 0).correspondences.size() == 0);

    const auto clean = make_correspondences(model, CorruptedMap{base, NoCorruption{}, 1}, 200);
    for (std::size_t i = 0; i < 200; ++i) {
      REQUIRE((base.apply(clean.correspondences.x[i]) - clean.correspondences.y[i]).norm() <= 1e-12);
    }

    const auto one = make_correspondences(model, CorruptedMap{base, PointFraction{0.01, 1.0}, 1}, 100);
    CHECK(count_true(one.corrupted) == 1);

    const auto again = make_correspondences(model, CorruptedMap{base, PointFraction{0.01, 1.0}, 1}, 100);
    CHECK(identical(one.correspondences.x, again.correspondences.x));
    CHECK(identical(one.correspondences.y, again.correspondences.y));
    CHECK(one.corrupted == again.corrupted);

    CHECK_THROWS_AS(make_correspondences(MeasureModel::standard_gaussian(3, 0), CorruptedMap{base, NoCorruption{}, 1}, 5),
                    DimensionMismatch);
  }

  TEST_CASE("null-set corruption never fires under a continuous measure") {
    Rng rng(12);
    const CorruptedMap map{random_isometry(rng, 2), Slab{pt({0.6, 0.8}), 0.1, 0.0, 1.0}, 3};
    const PointSet xs = sample(MeasureModel::standard_gaussian(2, 77), 1000000);
    CHECK(count_true(apply_corrupted(map, xs).corrupted) == 0);
  }

  TEST_CASE("pair corruption accounting") {
    const EuclideanIsometry base = EuclideanIsometry::identity(1);
    const std::vector<double> eps = {0.0, 0.01, 0.05, 0.1, 0.29, 0.3, 0.5};
    for (std::size_t n = 1; n <= 200; ++n) {
      PointSet xs;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(pt({static_cast<double>(i)}));
      for (double e : eps) {
        const auto out = apply_corrupted(CorruptedMap{base, PointFraction{e, 1.0}, n}, xs);
        const std::size_t k = count_true(out.corrupted);
        REQUIRE(k == corrupted_count(e, n));
        std::size_t bad_pairs = 0;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) bad_pairs += (out.corrupted[i] || out.corrupted[j]) ? 1 : 0;
        }
        // n^2 (1 - (1 - k/n)^2) = n^2 - (n-k)^2
        REQUIRE(bad_pairs == n * n - (n - k) * (n - k));
      }
    }
    CHECK(corrupted_count(0.29, 100) == 29);
    CHECK(corrupted_count(0.05, 1000) == 50);
    CHECK(corrupted_count(0.05, 999) == 49);
  }
}
