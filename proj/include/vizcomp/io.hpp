#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vizcomp/compose.hpp"
#include "vizcomp/intent.hpp"
#include "vizcomp/thresholds.hpp"

namespace vizcomp {

using Json = nlohmann::json;

struct Manifest {
  std::vector<DataTable> tables;
  std::vector<Relationship> relationships;  // declared
  std::vector<ViewSpec> views;
  Thresholds thresholds;
};

/// Parses and validates a manifest. Unknown fields are rejected. Throws
/// ParseError (with byte offset) or ValidationError (with a path such as
/// `views[0].table`).
Manifest load_manifest(std::string_view bytes);

/// Applies a thresholds override object (same fields as the manifest's
/// `thresholds`) on top of `base`.
Thresholds load_thresholds(std::string_view bytes, Thresholds base = {});

/// One event per non-blank line. Throws ParseError or OrderError carrying the
/// 1-based line number.
std::vector<InteractionEvent> load_trace(std::string_view bytes);

SessionState make_session(const Manifest& manifest);

/// Canonical text: sorted keys, no whitespace, floats with 6 significant
/// digits, integral numbers without a fraction and -0 written as 0.
std::string canonical(const Json& value);

std::string save_composite(const CompositeSpec& spec);
std::string save_composites(const std::vector<CompositeSpec>& specs);
/// Inverse of save_composite; values come back at 6 significant digits.
CompositeSpec load_composite(std::string_view bytes);

Json to_json(const Pose& pose);
Json to_json(const ViewSpec& view);
Json to_json(const CompositeSpec& spec);
Json to_json(const CandidateIntent& candidate);
Json to_json(const InteractionEvent& event);
Json to_json(const Relationship& rel);
Json to_json(const std::vector<CandidateIntent>& candidates);
/// Full snapshot for clients: views, composites, hands, active regions,
/// latched pairs and a relations summary.
Json state_json(const SessionState& state);

Pose pose_from_json(const Json& j, const std::string& path);
ViewSpec view_from_json(const Json& j, const std::string& path);
CompositeSpec composite_from_json(const Json& j, const std::string& path);
/// Event object as written in traces. Throws ValidationError with `path`.
InteractionEvent event_from_json(const Json& j, const std::string& path);

}  // namespace vizcomp
