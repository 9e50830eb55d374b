#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "aeiso/certifier.hpp"
#include "aeiso/errors.hpp"
#include "aeiso/extension.hpp"
#include "aeiso/geometry.hpp"
#include "aeiso/io.hpp"
#include "aeiso/isometry.hpp"
#include "aeiso/measure.hpp"
#include "aeiso/trilateration.hpp"

namespace py = pybind11;
using namespace aeiso;

namespace {

// Point sets cross the boundary as (n, d) arrays, one point per row.
PointSet rows(const Matrix& m) {
  PointSet out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
  return out;
}

Matrix stack(const PointSet& pts, std::size_t d) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return m;
}

CorrespondenceSet make_set(const Matrix& x, const Matrix& y) {
  CorrespondenceSet cs;
  cs.dimension = static_cast<std::size_t>(x.cols());
  cs.x = rows(x);
  cs.y = rows(y);
  cs.validate();
  return cs;
}

py::dict pair_defect_dict(const PairDefect& p) {
  py::dict out;
  out["preserving"] = p.preserving;
  out["i"] = p.i;
  out["j"] = p.j;
  out["defect"] = p.defect;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Isometry extension, trilateration and robust recovery from correspondences.";

  // The module keeps the types alive; the handles are deliberately leaked.
  static const py::handle math_error = py::exception<MathError>(m, "MathError", PyExc_ArithmeticError).release();
  static const py::handle parse_error = py::exception<ParseError>(m, "ParseError", PyExc_ValueError).release();
  // Instances carry the failure class (`kind`) or the input line (`line`).
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const MathError& e) {
      const py::handle type = math_error;
      py::object err = type(e.what());
      err.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(type.ptr(), err.ptr());
    } catch (const ParseError& e) {
      const py::handle type = parse_error;
      py::object err = type(e.what());
      err.attr("line") = e.line();
      PyErr_SetObject(type.ptr(), err.ptr());
    }
  });

  m.def("inner_product", &inner_product, py::arg("x"), py::arg("y"));
  m.def("inner_by_polarization", &inner_by_polarization, py::arg("x"), py::arg("y"));
  m.def("distance", &distance, py::arg("x"), py::arg("y"));
  m.def(
      "affinely_independent",
      [](const Matrix& pts, double rtol) { return affinely_independent(rows(pts), rtol); }, py::arg("points"),
      py::arg("rtol") = kDefaultRankRtol);
  m.def(
      "affine_dimension", [](const Matrix& pts, double rtol) { return affine_dimension(rows(pts), rtol); },
      py::arg("points"), py::arg("rtol") = kDefaultRankRtol);

  py::class_<EuclideanIsometry>(m, "EuclideanIsometry")
      .def(py::init<Matrix, Point>(), py::arg("Q"), py::arg("b"))
      .def_static("identity", [](std::size_t d) { return EuclideanIsometry::identity(d); }, py::arg("d"))
      .def_static("from_json", &isometry_from_json, py::arg("text"))
      .def_property_readonly("Q", &EuclideanIsometry::linear)
      .def_property_readonly("b", [](const EuclideanIsometry& h) { return h.translation(); })
      .def_property_readonly("dimension", &EuclideanIsometry::dimension)
      .def("apply", &EuclideanIsometry::apply, py::arg("x"))
      .def(
          "apply_rows",
          [](const EuclideanIsometry& h, const Matrix& pts) {
            Matrix out = pts * h.linear().transpose();
            out.rowwise() += h.translation().transpose();
            return out;
          },
          py::arg("points"))
      .def("inverse", [](const EuclideanIsometry& h) { return inverse(h); })
      .def(
          "compose", [](const EuclideanIsometry& outer, const EuclideanIsometry& inner) { return compose(outer, inner); },
          py::arg("inner"), "self after inner")
      .def(
          "is_valid", [](const EuclideanIsometry& h, double tol) { return is_valid(h, tol).valid; },
          py::arg("tol") = kDefaultIsometryTol)
      .def(
          "approx_equal",
          [](const EuclideanIsometry& a, const EuclideanIsometry& b, double tol) { return approx_equal(a, b, tol); },
          py::arg("other"), py::arg("tol") = kDefaultIsometryTol)
      .def("to_json", [](const EuclideanIsometry& h) { return to_json(h); })
      .def("__repr__", [](const EuclideanIsometry& h) { return "EuclideanIsometry(" + to_json(h) + ")"; });

  m.def(
      "check_distance_preserving",
      [](const Matrix& source, const Matrix& images, double pair_tol) {
        return pair_defect_dict(check_distance_preserving(LabeledSimplex(rows(source), rows(images)), pair_tol));
      },
      py::arg("source"), py::arg("images"), py::arg("pair_tol") = kDefaultPairTol);
  m.def(
      "extend_finite_isometry",
      [](const Matrix& source, const Matrix& images, double rtol, double pair_tol) {
        const Extension e = extend_finite_isometry(LabeledSimplex(rows(source), rows(images)), rtol, pair_tol);
        return py::make_tuple(e.isometry, e.repair);
      },
      py::arg("source"), py::arg("images"), py::arg("rtol") = kDefaultRankRtol, py::arg("pair_tol") = kDefaultPairTol,
      "Returns (isometry, orthogonal repair).");

  m.def(
      "locate",
      [](const Matrix& anchors, std::vector<double> distances, double res_tol, double rtol) {
        return locate(AnchorSet(rows(anchors), std::move(distances)), res_tol, rtol);
      },
      py::arg("anchors"), py::arg("distances"), py::arg("res_tol") = kDefaultResidualTol,
      py::arg("rtol") = kDefaultRankRtol);
  m.def(
      "equidistance_collapse",
      [](const Point& p, const Point& q, const Matrix& anchors, double tol, double rtol) {
        return equidistance_collapse(p, q, rows(anchors), tol, rtol);
      },
      py::arg("p"), py::arg("q"), py::arg("anchors"), py::arg("tol"), py::arg("rtol") = kDefaultRankRtol);

  py::class_<CorrespondenceSet>(m, "CorrespondenceSet")
      .def(py::init(&make_set), py::arg("x"), py::arg("y"))
      .def_property_readonly("dimension", [](const CorrespondenceSet& cs) { return cs.dimension; })
      .def_property_readonly("x", [](const CorrespondenceSet& cs) { return stack(cs.x, cs.dimension); })
      .def_property_readonly("y", [](const CorrespondenceSet& cs) { return stack(cs.y, cs.dimension); })
      .def("__len__", &CorrespondenceSet::size);

  m.def(
      "sample_gaussian",
      [](std::size_t d, std::size_t n, std::uint64_t seed) {
        return stack(sample(MeasureModel::standard_gaussian(d, seed), n), d);
      },
      py::arg("d"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "generate",
      [](std::size_t d, std::size_t n, double epsilon, std::uint64_t seed, const std::string& measure) {
        require_dimension(d);
        const MeasureModel model = measure_from_json(nlohmann::json{{"kind", measure}}, d, seed);
        Corruption corruption = NoCorruption{};
        if (epsilon > 0.0) corruption = PointFraction{epsilon, 1.0};
        Rng truth = Rng::substream(seed, Stream::GroundTruth);
        const CorruptedMap map{random_isometry(truth, d), corruption, seed};
        map.validate();
        GeneratedData data = make_correspondences(model, map, n);
        std::vector<std::size_t> corrupted;
        for (std::size_t i = 0; i < data.corrupted.size(); ++i) {
          if (data.corrupted[i]) corrupted.push_back(i);
        }
        return py::make_tuple(std::move(data.correspondences), map.base, corrupted);
      },
      py::arg("d"), py::arg("n"), py::arg("epsilon") = 0.0, py::arg("seed") = 0, py::arg("measure") = "gaussian",
      "Same data as the command-line generator: returns (correspondences, truth, corrupted indices).");

  py::class_<RecoveryConfig>(m, "RecoveryConfig")
      .def(py::init<>())
      .def_readwrite("rank_rtol", &RecoveryConfig::rank_rtol)
      .def_readwrite("pair_tol", &RecoveryConfig::pair_tol)
      .def_readwrite("tau", &RecoveryConfig::violation_tol)
      .def_readwrite("ransac_trials", &RecoveryConfig::ransac_trials)
      .def_readwrite("consensus_quorum", &RecoveryConfig::consensus_quorum)
      .def_readwrite("seed", &RecoveryConfig::seed)
      .def_readwrite("threads", &RecoveryConfig::threads)
      .def("validate", &RecoveryConfig::validate);

  m.def(
      "recover_oracle", [](const CorrespondenceSet& cs, const RecoveryConfig& cfg) { return recover_oracle(cs, cfg).isometry; },
      py::arg("correspondences"), py::arg("config") = RecoveryConfig{});
  m.def(
      "recover_robust",
      [](const CorrespondenceSet& cs, const RecoveryConfig& cfg) {
        const RobustRecovery r = recover_robust(cs, cfg);
        return py::make_tuple(r.isometry, r.inliers);
      },
      py::arg("correspondences"), py::arg("config") = RecoveryConfig{}, "Returns (isometry, inlier mask).");
  m.def("procrustes_fit", &procrustes_fit, py::arg("correspondences"), py::arg("inliers"),
        py::arg("rank_rtol") = kDefaultRankRtol);
  m.def(
      "wilson_interval",
      [](std::size_t k, std::size_t n) {
        const WilsonInterval w = wilson_interval(k, n);
        return py::make_tuple(w.low, w.high);
      },
      py::arg("successes"), py::arg("trials"));

  py::class_<CertificationReport>(m, "CertificationReport")
      .def_readonly("dimension", &CertificationReport::dimension)
      .def_readonly("n", &CertificationReport::n)
      .def_readonly("recovered", &CertificationReport::recovered)
      .def_readonly("violation_rate_hat", &CertificationReport::violation_rate_hat)
      .def_property_readonly("confidence_interval",
                             [](const CertificationReport& r) {
                               return py::make_tuple(r.confidence_interval.low, r.confidence_interval.high);
                             })
      .def_readonly("inlier_count", &CertificationReport::inlier_count)
      .def_readonly("outlier_count", &CertificationReport::outlier_count)
      .def_readonly("support_dimension", &CertificationReport::support_dimension)
      .def_readonly("failure", &CertificationReport::failure)
      .def_readonly("residuals", &CertificationReport::residuals)
      .def_readonly("inliers", &CertificationReport::inliers);

  m.def("certify", &certify, py::arg("correspondences"), py::arg("config") = RecoveryConfig{});
  m.def(
      "report_json",
      [](const CertificationReport& r, const RecoveryConfig& cfg) { return to_json(r, cfg); }, py::arg("report"),
      py::arg("config") = RecoveryConfig{});
}
