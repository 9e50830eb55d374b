#include "aeiso/io.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "aeiso/errors.hpp"
#include "aeiso/format.hpp"

namespace aeiso {

using nlohmann::json;

void write_correspondences(std::ostream& out, const CorrespondenceSet& cs) {
  cs.validate();
  out << "{\"d\":" << cs.dimension << ",\"n\":" << cs.size() << "}\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    out << "{\"x\":" << format_array(cs.x[i]) << ",\"y\":" << format_array(cs.y[i]) << "}\n";
  }
}

namespace {

json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
  }
}

std::size_t require_count(const json& doc, const char* key, std::size_t lineno) {
  if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 0) {
    throw ParseError(lineno, std::string("header needs a non-negative integer \"") + key + "\"");
  }
  return doc[key].get<std::size_t>();
}

}  // namespace

CorrespondenceSet read_correspondences(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_nonblank = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_nonblank()) throw ParseError(1, "missing header line {\"d\":..,\"n\":..}");
  const json header = parse_line(line, lineno);
  if (!header.is_object()) throw ParseError(lineno, "header must be a JSON object");
  CorrespondenceSet cs;
  cs.dimension = require_count(header, "d", lineno);
  if (cs.dimension < 1 || cs.dimension > kMaxDimension) throw ParseError(lineno, "dimension out of range");
  const std::size_t n = require_count(header, "n", lineno);
  cs.x.reserve(n);
  cs.y.reserve(n);

  while (next_nonblank()) {
    const json pair = parse_line(line, lineno);
    if (!pair.is_object() || !pair.contains("x") || !pair.contains("y")) {
      throw ParseError(lineno, "expected {\"x\":[..],\"y\":[..]}");
    }
    if (cs.x.size() == n) throw ParseError(lineno, "more pairs than the header's n = " + std::to_string(n));
    cs.x.push_back(point_from_json(pair["x"], cs.dimension, lineno));
    cs.y.push_back(point_from_json(pair["y"], cs.dimension, lineno));
  }
  if (cs.x.size() != n) {
    throw ParseError(lineno + 1, "header promised " + std::to_string(n) + " pairs, found " +
                                     std::to_string(cs.x.size()));
  }
  return cs;
}

// ---------------------------------------------------------------------------

namespace {

double number_or(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw std::invalid_argument(std::string("\"") + key + "\" must be a number");
  return doc[key].get<double>();
}

Point vector_or(const json& doc, const char* key, std::size_t d, const Point& fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return point_from_json(doc[key], d);
  } catch (const ParseError& e) {
    throw std::invalid_argument(std::string("\"") + key + "\": " + e.what());
  }
}

Matrix matrix_or(const json& doc, const char* key, std::size_t d, const Matrix& fallback) {
  if (!doc.contains(key)) return fallback;
  const Point flat = vector_or(doc, key, d * d, Point());
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = flat[static_cast<Eigen::Index>(i * d + j)];
  }
  return m;
}

std::string kind_of(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw std::invalid_argument("config needs a string \"kind\"");
  return doc["kind"].get<std::string>();
}

GaussianParams gaussian_from(const json& doc, std::size_t d) {
  return {vector_or(doc, "mean", d, Point::Zero(d)), matrix_or(doc, "cov", d, Matrix::Identity(d, d))};
}

Point unit_axis(std::size_t d) {
  Point e = Point::Zero(d);
  e[static_cast<Eigen::Index>(d) - 1] = 1.0;
  return e;
}

std::string gaussian_fields(const GaussianParams& g) {
  return "\"mean\":" + format_array(g.mean) + ",\"cov\":" + format_row_major(g.covariance);
}

}  // namespace

MeasureModel measure_from_json(const json& doc, std::size_t d, std::uint64_t seed) {
  require_dimension(d);
  const std::string kind = kind_of(doc);
  MeasureModel m{GaussianParams{}, seed};
  if (kind == "gaussian") {
    m.params = gaussian_from(doc, d);
  } else if (kind == "uniform-box") {
    m.params = UniformBoxParams{vector_or(doc, "lower", d, Point::Zero(d)),
                                vector_or(doc, "upper", d, Point::Ones(d))};
  } else if (kind == "gaussian-mixture") {
    if (!doc.contains("components") || !doc["components"].is_array() || !doc.contains("weights")) {
      throw std::invalid_argument("gaussian-mixture needs \"weights\" and \"components\"");
    }
    MixtureParams mix;
    const Point w = vector_or(doc, "weights", doc["components"].size(), Point());
    mix.weights.assign(w.data(), w.data() + w.size());
    for (const auto& c : doc["components"]) mix.components.push_back(gaussian_from(c, d));
    m.params = std::move(mix);
  } else if (kind == "hyperplane") {
    m.params = HyperplaneParams{vector_or(doc, "normal", d, unit_axis(d)), number_or(doc, "offset", 0.0),
                                number_or(doc, "spread", 1.0)};
  } else {
    throw std::invalid_argument("unknown measure kind \"" + kind + "\"");
  }
  m.validate();
  return m;
}

Corruption corruption_from_json(const json& doc, std::size_t d) {
  const std::string kind = kind_of(doc);
  if (kind == "none") return NoCorruption{};
  if (kind == "point-fraction") {
    return PointFraction{number_or(doc, "epsilon", 0.0), number_or(doc, "displacement", 1.0)};
  }
  if (kind == "slab") {
    return Slab{vector_or(doc, "normal", d, unit_axis(d)), number_or(doc, "offset", 0.0),
                number_or(doc, "thickness", 0.0), number_or(doc, "displacement", 1.0)};
  }
  throw std::invalid_argument("unknown corruption kind \"" + kind + "\"");
}

std::string to_json(const MeasureModel& m) {
  std::string body = "{\"kind\":\"" + std::string(kind_name(m.params)) + "\"";
  if (const auto* g = std::get_if<GaussianParams>(&m.params)) {
    body += "," + gaussian_fields(*g);
  } else if (const auto* b = std::get_if<UniformBoxParams>(&m.params)) {
    body += ",\"lower\":" + format_array(b->lower) + ",\"upper\":" + format_array(b->upper);
  } else if (const auto* mix = std::get_if<MixtureParams>(&m.params)) {
    body += ",\"weights\":" + format_array(mix->weights) + ",\"components\":[";
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      body += (i ? ",{" : "{") + gaussian_fields(mix->components[i]) + "}";
    }
    body += "]";
  } else if (const auto* h = std::get_if<HyperplaneParams>(&m.params)) {
    body += ",\"normal\":" + format_array(h->normal) + ",\"offset\":" + format_real(h->offset) +
            ",\"spread\":" + format_real(h->spread);
  }
  return body + ",\"seed\":" + std::to_string(m.seed) + "}";
}

std::string to_json(const Corruption& c) {
  std::string body = "{\"kind\":\"" + std::string(kind_name(c)) + "\"";
  if (const auto* pf = std::get_if<PointFraction>(&c)) {
    body += ",\"epsilon\":" + format_real(pf->epsilon) + ",\"displacement\":" + format_real(pf->displacement);
  } else if (const auto* s = std::get_if<Slab>(&c)) {
    body += ",\"normal\":" + format_array(s->normal) + ",\"offset\":" + format_real(s->offset) +
            ",\"thickness\":" + format_real(s->thickness) + ",\"displacement\":" + format_real(s->displacement);
  }
  return body + "}";
}

std::string to_json(const CertificationReport& r, const RecoveryConfig& cfg) {
  std::string out = "{\"d\":" + std::to_string(r.dimension) + ",\"n\":" + std::to_string(r.n);
  out += ",\"recovered\":" + (r.recovered ? to_json(*r.recovered) : std::string("null"));
  out += ",\"violation_rate_hat\":" + format_real(r.violation_rate_hat);
  out += ",\"confidence_interval\":[" + format_real(r.confidence_interval.low) + "," +
         format_real(r.confidence_interval.high) + "],\"confidence_level\":0.95";
  out += ",\"inlier_count\":" + std::to_string(r.inlier_count);
  out += ",\"outlier_count\":" + std::to_string(r.outlier_count);
  out += ",\"residual_stats\":{\"max\":" + format_real(r.residual_stats.max) +
         ",\"mean\":" + format_real(r.residual_stats.mean) + ",\"p95\":" + format_real(r.residual_stats.p95) + "}";
  out += ",\"support_dimension\":" + std::to_string(r.support_dimension);
  out += ",\"failure\":" + (r.failure.empty() ? std::string("null") : json(r.failure).dump());
  out += ",\"config\":{\"rank_rtol\":" + format_real(cfg.rank_rtol) + ",\"pair_tol\":" + format_real(cfg.pair_tol) +
         ",\"violation_tol\":" + format_real(cfg.violation_tol) +
         ",\"ransac_trials\":" + std::to_string(cfg.ransac_trials) +
         ",\"consensus_quorum\":" + format_real(cfg.consensus_quorum) + ",\"seed\":" + std::to_string(cfg.seed) + "}";
  return out + "}";
}

void write_residual_csv(std::ostream& out, const CertificationReport& report) {
  out << "index,residual,inlier\n";
  for (std::size_t i = 0; i < report.residuals.size(); ++i) {
    out << i << ',' << format_real(report.residuals[i]) << ',' << (report.inliers[i] ? 1 : 0) << '\n';
  }
}

namespace {

json parse_document(const std::string& text) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ParseError(0, "expected a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

LabeledSimplex labeled_simplex_from_json(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.contains("source") || !doc.contains("images")) throw ParseError(0, "need \"source\" and \"images\"");
  try {
    return {points_from_json(doc["source"]), points_from_json(doc["images"])};
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

AnchorSet anchor_set_from_json(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.contains("anchors") || !doc.contains("distances")) throw ParseError(0, "need \"anchors\" and \"distances\"");
  PointSet anchors = points_from_json(doc["anchors"]);
  const Point r = point_from_json(doc["distances"], anchors.size());
  try {
    return {std::move(anchors), std::vector<double>(r.data(), r.data() + r.size())};
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

}  // namespace aeiso
