#pragma once

#include <string>

#include <json.hpp>

#include "haarlab/czd.hpp"
#include "haarlab/func.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/measure.hpp"

namespace haarlab {

using json = nlohmann::json;

// Measure specs: {"kind": "lebesgue"|"split"|"r2_nonstandard"|"product"|"explicit", ...}.
MeasureTree measure_from_json(const json& spec);
// Emits the explicit form (depth + row-major leaf masses); round-trips.
json measure_to_json(const MeasureTree& mu);

// {"resolution": M, "values": [...]} in row-major leaf order (+ "dim").
SimpleFunction function_from_json(const json& j);
json function_to_json(const SimpleFunction& f);

// {"builder": "canonical1d"|"wilson"|"mitrea"|"tensor"|"indicator"|"custom", ...}.
// Tensor builders take the 1D factors from a "factors" list of measure specs;
// custom builders take "entries": [{"cube": "k:c1,..", "child_values": [...]}].
HaarSystem system_from_json(const json& spec, const MeasureTree& mu);

json verification_to_json(const VerificationReport& rep);

// 17-significant-digit decimal, '.' separator (lossless round-trip).
std::string format_double(double v);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace haarlab
