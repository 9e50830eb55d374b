#pragma once

// Lossless decimal emission and JSON array helpers shared by every file format.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeiso/geometry.hpp"

namespace aeiso {

/// 17 significant digits: parses back to the identical double.
std::string format_real(double value);

/// "[x0,x1,...]"
std::string format_array(const Point& x);
std::string format_array(const std::vector<double>& values);

/// Row-major "[[...],[...]]"-free flat array of a matrix.
std::string format_row_major(const Matrix& m);

/// Throws ParseError (with `line`) unless `node` is an array of `expected`
/// finite numbers; expected == 0 accepts any non-empty length.
Point point_from_json(const nlohmann::json& node, std::size_t expected, std::size_t line = 0);

PointSet points_from_json(const nlohmann::json& node, std::size_t line = 0);

}  // namespace aeiso
