#pragma once

#include "json.hpp"

#include "cand/knowledge.hpp"

namespace cand {

nlohmann::json to_json(const KnowledgeBundle& bundle);
KnowledgeBundle knowledge_from_json(const nlohmann::json& doc);

}  // namespace cand
