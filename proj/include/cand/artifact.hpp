#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "cand/error.hpp"

namespace cand {

inline constexpr int kFormatVersion = 1;

/// Fresh artifact document carrying the format version and kind tag.
inline nlohmann::json artifact_header(std::string_view kind) {
    return {{"format_version", kFormatVersion}, {"kind", std::string(kind)}};
}

/// Throws ArtifactError unless `doc` is a `kind` artifact of the current version.
inline void check_artifact(const nlohmann::json& doc, std::string_view kind) {
    if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("kind"))
        throw ArtifactError("not a versioned artifact (expected kind '" + std::string(kind) + "')");
    if (doc.at("kind") != kind)
        throw ArtifactError("expected a '" + std::string(kind) + "' artifact, found '" +
                            doc.at("kind").get<std::string>() + "'");
    if (doc.at("format_version") != kFormatVersion)
        throw ArtifactError("unsupported " + std::string(kind) + " format version " + doc.at("format_version").dump());
}

}  // namespace cand
