#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "kgsum/anomaly.hpp"
#include "kgsum/error.hpp"
#include "kgsum/eval.hpp"

namespace kgsum {

// --- ranking files ---------------------------------------------------------

void write_ranking(std::span<const ScoredTriple> ranking, std::ostream& out) {
  char buf[64];
  for (const auto& r : ranking) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.score);
    out << r.edge.subject << '\t' << r.edge.predicate << '\t' << r.edge.object << '\t'
        << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

std::vector<ScoredTriple> read_ranking(std::istream& in) {
  std::vector<ScoredTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 4) throw ParseError("ranking: expected 4 tab-separated fields, got " + std::to_string(f.size()), line_no);
    double score = 0;
    auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), score);
    if (ec != std::errc() || ptr != f[3].data() + f[3].size()) throw ParseError("ranking: bad score '" + f[3] + "'", line_no);
    out.push_back({{f[0], f[1], f[2]}, score});
  }
  return out;
}

std::vector<ScoredTriple> read_ranking_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ranking file '" + path + "'");
  return read_ranking(in);
}

// --- metrics ---------------------------------------------------------------

double auc_score(std::span<const double> scores, std::span<const char> positive) {
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney: average ranks over tied groups.
  double rank_sum = 0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (positive[order[t]]) {
        rank_sum += avg_rank;
        ++pos;
      }
    i = j;
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw DomainError("AUC needs at least one positive and one negative");
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1) / 2.0) / (p * static_cast<double>(neg));
}

MetricsReport compute_metrics(std::span<const ScoredTriple> ranking, const EdgeTruth& truth,
                              std::optional<AnomalyType> only, std::size_t k) {
  if (truth.perturbed.empty()) throw DomainError("ground truth has no perturbed edges");
  if (k == 0) throw ConfigError("k must be >= 1");
  std::map<NamedTriple, std::set<AnomalyType>> types;
  for (const auto& p : truth.perturbed) types[p.edge].insert(p.type);

  std::vector<double> scores;
  std::vector<char> positive;
  for (const auto& r : ranking) {
    auto it = types.find(r.edge);
    bool pos = it != types.end();
    if (pos && only && !it->second.count(*only)) continue;  // another type's edge
    scores.push_back(r.score);
    positive.push_back(pos ? 1 : 0);
  }

  MetricsReport m;
  m.k = k;
  m.positives = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), 1));
  m.negatives = positive.size() - m.positives;
  if (m.positives == 0) throw DomainError("ranking contains no perturbed edges");

  // Predicted score 1/rank with competition ranks (ties share the best rank).
  std::vector<double> reciprocal(scores.size());
  for (std::size_t i = 0; i < scores.size();) {
    std::size_t j = i;
    while (j < scores.size() && scores[j] == scores[i]) ++j;
    for (std::size_t t = i; t < j; ++t) reciprocal[t] = 1.0 / static_cast<double>(i + 1);
    i = j;
  }
  m.auc = auc_score(reciprocal, positive);

  std::size_t cutoff = std::min(k, scores.size());
  while (cutoff > 0 && cutoff < scores.size() && scores[cutoff] == scores[cutoff - 1]) ++cutoff;
  m.cutoff = cutoff;
  const auto hits = static_cast<std::size_t>(std::count(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(cutoff), 1));
  m.precision_at_k = cutoff ? static_cast<double>(hits) / static_cast<double>(cutoff) : 0.0;
  m.recall_at_k = static_cast<double>(hits) / static_cast<double>(m.positives);
  const double pr = m.precision_at_k + m.recall_at_k;
  m.f1_at_k = pr > 0 ? 2 * m.precision_at_k * m.recall_at_k / pr : 0.0;
  return m;
}

// --- completeness ----------------------------------------------------------

CompletenessReport completeness(const Model& model, const RemovalTruth& truth) {
  const auto& g = model.graph();
  std::map<std::string, const RemovedNode*> by_name;
  for (const auto& r : truth.removed) by_name[r.node] = &r;

  CompletenessReport rep;
  std::size_t found = 0;
  std::size_t found_label = 0;
  for (const auto& name : truth.test) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw DomainError("test node '" + name + "' is not among the removed nodes");
    const auto& removed = *it->second;
    ++rep.evaluated;
    bool hit = false;
    bool hit_label = false;
    for (const auto& a : removed.assertions) {
      auto u = g.node_names().find(a.neighbor);
      auto p = g.predicate_names().find(a.predicate);
      if (!u || !p) continue;
      for (const auto& r : model.rules()) {
        if (!g.has_all_labels(*u, r.rule.root_labels) || r.assertions.is_correct(*u)) continue;
        for (const auto& c : r.rule.children) {
          if (c.predicate != *p || c.direction != a.direction) continue;
          hit = true;
          bool subset = std::all_of(c.rule.root_labels.begin(), c.rule.root_labels.end(), [&](LabelId l) {
            return std::binary_search(removed.labels.begin(), removed.labels.end(), g.label_names().name(l));
          });
          hit_label = hit_label || subset;
        }
      }
      if (hit && hit_label) break;
    }
    found += hit;
    found_label += hit_label;
  }
  if (rep.evaluated > 0) {
    rep.recall = static_cast<double>(found) / static_cast<double>(rep.evaluated);
    rep.recall_label = static_cast<double>(found_label) / static_cast<double>(rep.evaluated);
  }
  return rep;
}

std::vector<MissingInfo> missing_information(const Model& model) {
  const auto& g = model.graph();
  auto scores = node_scores(model);
  std::vector<MissingInfo> out;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& r = model.rules()[i];
    for (auto v : r.assertions.exception_starts(r.rule, g)) {
      for (const auto& c : r.rule.children) {
        bool present = false;
        for (const auto& adj : g.neighbors(v, c.predicate, c.direction))
          if (g.has_all_labels(adj.node, c.rule.root_labels)) {
            present = true;
            break;
          }
        if (!present) out.push_back({v, i, c.predicate, c.direction, c.rule.root_labels, scores[v]});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const MissingInfo& a, const MissingInfo& b) {
    if (a.node_score != b.node_score) return a.node_score > b.node_score;
    return a.node < b.node;
  });
  return out;
}

// --- truth files -----------------------------------------------------------

namespace {

Json triple_json(const NamedTriple& t) { return Json::array({t.subject, t.predicate, t.object}); }

NamedTriple triple_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw StructuralError("triple must be a 3-element array");
  return {j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::string>()};
}

Json triples_json(const std::vector<NamedTriple>& ts) {
  Json a = Json::array();
  for (const auto& t : ts) a.push_back(triple_json(t));
  return a;
}

std::vector<NamedTriple> triples_from(const Json& j) {
  std::vector<NamedTriple> out;
  for (const auto& t : j) out.push_back(triple_from(t));
  return out;
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw StructuralError(std::string("truth document lacks '") + key + "'");
  return j.at(key);
}

}  // namespace

Json edge_truth_to_json(const EdgeTruth& t) {
  Json j;
  j["mode"] = "anomalies";
  Json perturbed = Json::array();
  for (const auto& p : t.perturbed) {
    Json e;
    e["edge"] = triple_json(p.edge);
    e["type"] = to_string(p.type);
    perturbed.push_back(std::move(e));
  }
  j["perturbed"] = std::move(perturbed);
  j["clean"] = triples_json(t.clean);
  j["validation"] = triples_json(t.validation);
  j["test"] = triples_json(t.test);
  return j;
}

EdgeTruth edge_truth_from_json(const Json& j) {
  try {
    EdgeTruth t;
    for (const auto& p : need(j, "perturbed"))
      t.perturbed.push_back({triple_from(need(p, "edge")), anomaly_from_string(need(p, "type").get<std::string>())});
    t.clean = triples_from(need(j, "clean"));
    t.validation = triples_from(need(j, "validation"));
    t.test = triples_from(need(j, "test"));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed truth document: ") + e.what());
  }
}

Json removal_truth_to_json(const RemovalTruth& t) {
  Json j;
  j["mode"] = "pca";
  Json removed = Json::array();
  for (const auto& r : t.removed) {
    Json rj;
    rj["node"] = r.node;
    rj["labels"] = r.labels;
    Json as = Json::array();
    for (const auto& a : r.assertions) {
      Json aj;
      aj["neighbor"] = a.neighbor;
      aj["predicate"] = a.predicate;
      aj["direction"] = to_string(a.direction);
      as.push_back(std::move(aj));
    }
    rj["assertions"] = std::move(as);
    removed.push_back(std::move(rj));
  }
  j["removed"] = std::move(removed);
  j["validation"] = t.validation;
  j["test"] = t.test;
  return j;
}

RemovalTruth removal_truth_from_json(const Json& j) {
  try {
    RemovalTruth t;
    for (const auto& rj : need(j, "removed")) {
      RemovedNode r;
      r.node = need(rj, "node").get<std::string>();
      r.labels = need(rj, "labels").get<std::vector<std::string>>();
      std::sort(r.labels.begin(), r.labels.end());
      for (const auto& aj : need(rj, "assertions"))
        r.assertions.push_back({need(aj, "neighbor").get<std::string>(), need(aj, "predicate").get<std::string>(),
                                direction_from_string(need(aj, "direction").get<std::string>())});
      t.removed.push_back(std::move(r));
    }
    t.validation = need(j, "validation").get<std::vector<std::string>>();
    t.test = need(j, "test").get<std::vector<std::string>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("malformed truth document: ") + e.what());
  }
}

}  // namespace kgsum
