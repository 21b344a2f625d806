#pragma once

// JSON and CSV encodings for settings, knowledge functions, matrices and traces.
//
// Knowledge functions serialize to
//   {"experiences": [[...], ...], "concepts": {...}, "values": [[...], ...]}
// with concepts either {"type": "box", "lo": [...], "hi": [...]} or
// {"type": "discrete", "labels": [...], "points": [[...], ...]}.
// Reals are written with 17 significant digits.

#include <memory>
#include <json.hpp>
#include <ostream>
#include <string>
#include <string_view>

#include "epidyn/influence.hpp"
#include "epidyn/knowledge.hpp"
#include "epidyn/metrics.hpp"
#include "epidyn/spectral.hpp"

namespace epidyn {

using Json = nlohmann::ordered_json;

Json concepts_to_json(const ConceptSpace& concepts);
ConceptSpace concepts_from_json(const Json& j);

Json setting_to_json(const KnowledgeSetting& setting);
std::shared_ptr<const KnowledgeSetting> setting_from_json(const Json& j);

/// Per-experience concept vectors: [[c_0...], [c_1...], ...].
Json values_to_json(const KnowledgeFunction& k);
KnowledgeFunction values_from_json(std::shared_ptr<const KnowledgeSetting> setting, const Json& j);

Json function_to_json(const KnowledgeFunction& k);
KnowledgeFunction function_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json spectral_to_json(const SpectralReport& r);

/// Formats a double with 17 significant digits ("nan" for NaN).
std::string format_real(double v);

/// Header "j0,j1,...", then one row per matrix row.
void write_matrix_csv(std::ostream& os, const Matrix& m);

/// Columns t,replicate,d_consensus,d_nearest,relative_entropy.
void write_trace_csv(std::ostream& os, const MetricTrace& trace);

/// Columns t,d_consensus,d_nearest,relative_entropy.
void write_mean_csv(std::ostream& os, const MetricTrace& trace);

/// SHA-1 of "blob <size>\0<content>", hex encoded (the git object id of the content).
std::string git_blob_hash(std::string_view content);

}  // namespace epidyn
