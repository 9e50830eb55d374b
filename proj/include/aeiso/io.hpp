#pragma once

// File formats. All numbers are written with 17 significant digits.
//
// Correspondences (JSON Lines):
//     {"d":2,"n":3}
//     {"x":[...],"y":[...]}      one line per pair, n lines
//
// Measure model:   {"kind":"gaussian"|"uniform-box"|"gaussian-mixture"|"hyperplane", ...}
// Corrupted map:   {"kind":"none"|"point-fraction"|"slab", ...}
// Both schemas are documented in README.md.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeiso/certifier.hpp"
#include "aeiso/measure.hpp"
#include "aeiso/trilateration.hpp"

namespace aeiso {

void write_correspondences(std::ostream& out, const CorrespondenceSet& cs);
/// Throws ParseError carrying the 1-based line number of the first bad line.
CorrespondenceSet read_correspondences(std::istream& in);

/// Model/corruption documents. `d` and `seed` come from the caller because
/// the CLI allows them to be overridden by flags. Throws std::invalid_argument.
MeasureModel measure_from_json(const nlohmann::json& doc, std::size_t d, std::uint64_t seed);
Corruption corruption_from_json(const nlohmann::json& doc, std::size_t d);
std::string to_json(const MeasureModel& m);
std::string to_json(const Corruption& c);

std::string to_json(const CertificationReport& report, const RecoveryConfig& cfg);
/// "index,residual,inlier" header plus one row per point.
void write_residual_csv(std::ostream& out, const CertificationReport& report);

/// {"source":[[..],..],"images":[[..],..]}
LabeledSimplex labeled_simplex_from_json(const std::string& text);
/// {"anchors":[[..],..],"distances":[..]}
AnchorSet anchor_set_from_json(const std::string& text);

}  // namespace aeiso
