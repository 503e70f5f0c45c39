#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "kgsum/model.hpp"

namespace kgsum {

using Json = nlohmann::ordered_json;

// Rules nested deeper than this are rejected on input.
inline constexpr std::size_t kMaxRuleDepth = 64;

// {root_labels:[...], children:[{predicate, direction, child:{...}}]} with
// external names. Names absent from g map to kUnknownId on input; unknown ids
// raise DomainError on output.
Json rule_to_json(const Rule& rule, const KnowledgeGraph& g);
Rule rule_from_json(const Json& j, const KnowledgeGraph& g);

struct ModelSummary {
  Bits model_bits = 0;
  Bits error_bits = 0;
  Bits total_bits = 0;
  Bits empty_bits = 0;
  double pct_bits_vs_empty = 0;    // 100 * total / empty
  double pct_edges_explained = 0;  // 100 * |A_M| / |A|
};
ModelSummary summarize_model(const Model& model);

Json model_to_json(const Model& model);
void write_model(const Model& model, std::ostream& out);

// Re-matches the stored rules on g, in file order. A rule with no start node
// on g raises DomainError.
Model model_from_json(const Json& j, const KnowledgeGraph& g);
Model read_model(std::istream& in, const KnowledgeGraph& g);
Model read_model_file(const std::string& path, const KnowledgeGraph& g);

}  // namespace kgsum
