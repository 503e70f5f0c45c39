#include "kgsum/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "kgsum/error.hpp"

namespace kgsum {

namespace {

const std::string& known_name(const SymbolTable& table, std::uint32_t id, const char* what) {
  if (id >= table.size()) throw DomainError(std::string("rule refers to a ") + what + " unknown to the graph");
  return table.name(id);
}

Json names_of(std::span<const LabelId> labels, const KnowledgeGraph& g) {
  std::vector<std::string> names;
  for (auto l : labels) names.push_back(known_name(g.label_names(), l, "label"));
  std::sort(names.begin(), names.end());
  return Json(names);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw StructuralError("rule record must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw StructuralError(std::string("rule record lacks '") + key + "'");
  return *it;
}

Rule parse_rule(const Json& j, const KnowledgeGraph& g, std::size_t depth) {
  if (depth > kMaxRuleDepth) throw StructuralError("rule nesting exceeds depth " + std::to_string(kMaxRuleDepth));
  Rule r;
  const auto& roots = field(j, "root_labels");
  if (!roots.is_array() || roots.empty()) throw StructuralError("root_labels must be a nonempty array");
  for (const auto& name : roots) {
    if (!name.is_string()) throw StructuralError("label names must be strings");
    r.root_labels.push_back(g.label_names().id_or_unknown(name.get<std::string>()));
  }
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array()) throw StructuralError("children must be an array");
    for (const auto& c : *it) {
      const auto& p = field(c, "predicate");
      const auto& d = field(c, "direction");
      if (!p.is_string() || !d.is_string()) throw StructuralError("predicate and direction must be strings");
      Direction dir;
      try {
        dir = direction_from_string(d.get<std::string>());
      } catch (const Error& e) {
        throw StructuralError(e.what());
      }
      r.children.push_back(
          Child{g.predicate_names().id_or_unknown(p.get<std::string>()), dir, parse_rule(field(c, "child"), g, depth + 1)});
    }
  }
  return canonicalize(std::move(r));
}

}  // namespace

Json rule_to_json(const Rule& rule, const KnowledgeGraph& g) {
  Json j;
  j["root_labels"] = names_of(rule.root_labels, g);
  Json children = Json::array();
  for (const auto& c : rule.children) {
    Json cj;
    cj["predicate"] = known_name(g.predicate_names(), c.predicate, "predicate");
    cj["direction"] = to_string(c.direction);
    cj["child"] = rule_to_json(c.rule, g);
    children.push_back(std::move(cj));
  }
  j["children"] = std::move(children);
  return j;
}

Rule rule_from_json(const Json& j, const KnowledgeGraph& g) { return parse_rule(j, g, 0); }

ModelSummary summarize_model(const Model& model) {
  ModelSummary s;
  s.model_bits = model.model_bits();
  s.error_bits = model.error_bits();
  s.total_bits = s.model_bits + s.error_bits;
  s.empty_bits = model.empty_bits();
  s.pct_bits_vs_empty = s.empty_bits > 0 ? 100.0 * s.total_bits / s.empty_bits : 100.0;
  const auto& cov = model.coverage();
  s.pct_edges_explained =
      cov.total_edges() > 0 ? 100.0 * static_cast<double>(cov.modeled_edges()) / static_cast<double>(cov.total_edges()) : 0.0;
  return s;
}

Json model_to_json(const Model& model) {
  const auto& g = model.graph();
  Json rules = Json::array();
  for (const auto& r : model.rules()) {
    Json rj;
    rj["rule"] = rule_to_json(r.rule, g);
    rj["L_rule_bits"] = r.rule_bits;
    rj["L_assertions_bits"] = r.assertion_bits;
    rj["num_correct"] = r.assertions.num_correct();
    rj["num_exceptions"] = r.assertions.num_exceptions();
    rules.push_back(std::move(rj));
  }
  auto s = summarize_model(model);
  Json j;
  j["rules"] = std::move(rules);
  j["L_model_bits"] = s.model_bits;
  j["L_error_bits"] = s.error_bits;
  j["L_total_bits"] = s.total_bits;
  j["pct_bits_vs_empty"] = s.pct_bits_vs_empty;
  j["pct_edges_explained"] = s.pct_edges_explained;
  return j;
}

void write_model(const Model& model, std::ostream& out) { out << model_to_json(model).dump(2) << '\n'; }

Model model_from_json(const Json& j, const KnowledgeGraph& g) {
  if (!j.is_object() || !j.contains("rules") || !j["rules"].is_array())
    throw StructuralError("model document must be an object with a 'rules' array");
  Model model(g);
  std::size_t index = 0;
  for (const auto& rj : j["rules"]) {
    if (!rj.is_object() || !rj.contains("rule")) throw StructuralError("model rule entry lacks 'rule'");
    auto mr = make_model_rule(rule_from_json(rj["rule"], g), g);
    if (mr.assertions.num_assertions == 0)
      throw DomainError("model rule " + std::to_string(index) + " has no start node in this graph");
    model.add(std::move(mr));
    ++index;
  }
  return model;
}

Model read_model(std::istream& in, const KnowledgeGraph& g) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("malformed model document: ") + e.what());
  }
  return model_from_json(j, g);
}

Model read_model_file(const std::string& path, const KnowledgeGraph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return read_model(in, g);
}

}  // namespace kgsum
