#include "aeiso/format.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aeiso/errors.hpp"

namespace aeiso {

std::string format_real(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot emit a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

template <typename Range>
std::string join_reals(const Range& values) {
  std::string out = "[";
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_real(v);
    first = false;
  }
  out += ']';
  return out;
}

}  // namespace

std::string format_array(const Point& x) {
  return join_reals(std::vector<double>(x.data(), x.data() + x.size()));
}

std::string format_array(const std::vector<double>& values) { return join_reals(values); }

std::string format_row_major(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  }
  return join_reals(flat);
}

Point point_from_json(const nlohmann::json& node, std::size_t expected, std::size_t line) {
  if (!node.is_array() || node.empty()) throw ParseError(line, "expected a non-empty number array");
  if (expected != 0 && node.size() != expected) {
    throw ParseError(line, "expected " + std::to_string(expected) + " coordinates, got " +
                               std::to_string(node.size()));
  }
  Point p(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw ParseError(line, "coordinate is not a number");
    p[static_cast<Eigen::Index>(i)] = node[i].get<double>();
  }
  if (!p.allFinite()) throw ParseError(line, "non-finite coordinate");
  return p;
}

PointSet points_from_json(const nlohmann::json& node, std::size_t line) {
  if (!node.is_array() || node.empty()) throw ParseError(line, "expected an array of points");
  PointSet out;
  out.reserve(node.size());
  for (const auto& item : node) {
    out.push_back(point_from_json(item, out.empty() ? 0 : out.front().size(), line));
  }
  return out;
}

}  // namespace aeiso
