#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "kgsum/error.hpp"
#include "kgsum/eval.hpp"

namespace kgsum {

const char* to_string(AnomalyType t) {
  switch (t) {
    case AnomalyType::A1: return "a1";
    case AnomalyType::A2: return "a2";
    case AnomalyType::A3: return "a3";
    case AnomalyType::A4: return "a4";
  }
  return "a1";
}

AnomalyType anomaly_from_string(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "a1") return AnomalyType::A1;
  if (lower == "a2") return AnomalyType::A2;
  if (lower == "a3") return AnomalyType::A3;
  if (lower == "a4") return AnomalyType::A4;
  throw ConfigError("unknown anomaly type '" + std::string(s) + "' (expected a1..a4)");
}

std::vector<AnomalyType> parse_anomaly_list(std::string_view csv) {
  std::vector<AnomalyType> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto comma = csv.find(',', start);
    auto item = csv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!item.empty()) out.push_back(anomaly_from_string(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw ConfigError("no anomaly types given");
  return out;
}

namespace {

std::size_t sample_size(double q, std::size_t n) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must be in (0, 1]");
  if (q * static_cast<double>(n) < 1.0) throw DomainError("q * |V| < 1: nothing to sample");
  return static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
}

std::vector<NodeId> sample_nodes(std::vector<NodeId> pool, std::size_t k, std::mt19937_64& rng) {
  std::vector<NodeId> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), std::min(k, pool.size()), rng);
  return out;
}

std::vector<NodeId> all_nodes(const KnowledgeGraph& g) {
  std::vector<NodeId> v(g.num_nodes());
  for (NodeId i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

// A label of g's alphabet that `held` lacks, or kUnknownId.
LabelId foreign_label(const std::vector<LabelId>& held, std::size_t num_labels, std::mt19937_64& rng) {
  if (held.size() >= num_labels) return kUnknownId;
  std::vector<LabelId> options;
  for (LabelId l = 0; l < num_labels; ++l)
    if (!std::binary_search(held.begin(), held.end(), l)) options.push_back(l);
  return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
}

}  // namespace

PerturbationResult perturb(const KnowledgeGraph& g, const PerturbationSpec& spec) {
  if (spec.types.empty()) throw ConfigError("no anomaly types given");
  const auto k = sample_size(spec.q, g.num_nodes());
  std::mt19937_64 rng(spec.seed);
  GraphBuilder b(g);
  std::vector<AnomalyType> types = spec.types;
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());

  std::map<AnomalyType, std::vector<NodeId>> altered;
  std::set<Triple> injected;
  for (auto type : types) {
    switch (type) {
      case AnomalyType::A1: {
        std::vector<NodeId> pool;
        for (NodeId v = 0; v < g.num_nodes(); ++v)
          if (g.labels(v).size() >= 2) pool.push_back(v);
        if (pool.empty()) throw DomainError("A1 needs nodes with at least two labels");
        for (auto v : sample_nodes(pool, k, rng)) {
          const auto& ls = b.labels(v);
          auto l = ls[std::uniform_int_distribution<std::size_t>(0, ls.size() - 1)(rng)];
          b.remove_label(v, l);
          altered[type].push_back(v);
        }
        break;
      }
      case AnomalyType::A2:
        for (auto v : sample_nodes(all_nodes(g), k, rng)) {
          auto l = foreign_label(b.labels(v), g.num_labels(), rng);
          if (l == kUnknownId) continue;
          b.add_label(v, l);
          altered[type].push_back(v);
        }
        break;
      case AnomalyType::A3: {
        if (g.num_predicates() == 0 || g.num_nodes() < 2) throw DomainError("A3 needs at least one predicate and two nodes");
        std::uniform_int_distribution<NodeId> node_dist(0, static_cast<NodeId>(g.num_nodes() - 1));
        std::uniform_int_distribution<PredId> pred_dist(0, static_cast<PredId>(g.num_predicates() - 1));
        for (auto v : sample_nodes(all_nodes(g), k, rng)) {
          const int count = std::uniform_int_distribution<int>(1, 2)(rng);
          for (int c = 0; c < count; ++c) {
            // A few redraws to avoid self-loops and edges that already exist.
            for (int attempt = 0; attempt < 32; ++attempt) {
              Triple t{v, pred_dist(rng), node_dist(rng)};
              if (t.object == v || g.find_edge(t) || injected.count(t)) continue;
              b.add_triple(t);
              injected.insert(t);
              break;
            }
          }
        }
        break;
      }
      case AnomalyType::A4:
        for (auto v : sample_nodes(all_nodes(g), k, rng)) {
          const auto& ls = b.labels(v);
          if (ls.empty()) continue;
          auto replacement = foreign_label(ls, g.num_labels(), rng);
          if (replacement == kUnknownId) continue;
          auto old = ls[std::uniform_int_distribution<std::size_t>(0, ls.size() - 1)(rng)];
          b.remove_label(v, old);
          b.add_label(v, replacement);
          altered[type].push_back(v);
        }
        break;
    }
  }

  PerturbationResult res{b.build(), {}};
  const auto& pg = res.graph;
  std::set<NamedTriple> positive;
  for (auto type : types) {
    std::vector<NamedTriple> edges;
    if (type == AnomalyType::A3) {
      for (const auto& t : injected) edges.push_back(name_of(t, g));
    } else {
      for (auto v : altered[type]) {
        auto pv = pg.node_names().find(g.node_names().name(v));
        if (!pv) continue;
        for (auto d : {Direction::Out, Direction::In})
          for (const auto& adj : pg.neighbors(*pv, d)) edges.push_back(name_of(pg.edge(adj.edge), pg));
      }
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    for (auto& e : edges) {
      positive.insert(e);
      res.truth.perturbed.push_back({std::move(e), type});
    }
  }

  // Clean edges: as many as there are distinct positives, uniformly from the rest.
  std::vector<NamedTriple> pool;
  for (const auto& t : pg.distinct_edges()) {
    auto named = name_of(t, pg);
    if (!positive.count(named)) pool.push_back(std::move(named));
  }
  std::sample(pool.begin(), pool.end(), std::back_inserter(res.truth.clean), std::min(positive.size(), pool.size()), rng);

  std::vector<NamedTriple> mixture(positive.begin(), positive.end());
  mixture.insert(mixture.end(), res.truth.clean.begin(), res.truth.clean.end());
  std::sort(mixture.begin(), mixture.end());
  auto [val, test] = split_validation_test(std::move(mixture), spec.validation_fraction, rng());
  res.truth.validation = std::move(val);
  res.truth.test = std::move(test);
  return res;
}

RemovalResult remove_nodes_pca(const KnowledgeGraph& g, double q, std::uint64_t seed, double validation_fraction) {
  const auto k = sample_size(q, g.num_nodes());
  std::mt19937_64 rng(seed);
  auto chosen = sample_nodes(all_nodes(g), k, rng);
  std::vector<bool> gone(g.num_nodes(), false);
  for (auto v : chosen) gone[v] = true;

  GraphBuilder b(g);
  RemovalTruth truth;
  // (neighbour, predicate, direction from the neighbour) kinds to clear.
  std::set<std::tuple<NodeId, PredId, Direction>> cleared;
  for (auto v : chosen) {
    RemovedNode r;
    r.node = g.node_names().name(v);
    for (auto l : g.labels(v)) r.labels.push_back(g.label_names().name(l));
    std::sort(r.labels.begin(), r.labels.end());
    for (auto d : {Direction::Out, Direction::In}) {
      for (const auto& adj : g.neighbors(v, d)) {
        if (gone[adj.node]) continue;
        // v -p-> u is an incoming p-edge of u, and vice versa.
        const auto from_neighbor = reverse(d);
        cleared.emplace(adj.node, adj.predicate, from_neighbor);
        r.assertions.push_back({g.node_names().name(adj.node), g.predicate_names().name(adj.predicate), from_neighbor});
      }
    }
    std::sort(r.assertions.begin(), r.assertions.end(), [](const auto& a, const auto& c) {
      return std::tie(a.neighbor, a.predicate, a.direction) < std::tie(c.neighbor, c.predicate, c.direction);
    });
    r.assertions.erase(std::unique(r.assertions.begin(), r.assertions.end(),
                                   [](const auto& a, const auto& c) {
                                     return std::tie(a.neighbor, a.predicate, a.direction) ==
                                            std::tie(c.neighbor, c.predicate, c.direction);
                                   }),
                       r.assertions.end());
    truth.removed.push_back(std::move(r));
    b.remove_node(v);
  }
  b.remove_edges_if([&](const Triple& t) {
    return cleared.count({t.subject, t.predicate, Direction::Out}) > 0 ||
           cleared.count({t.object, t.predicate, Direction::In}) > 0;
  });

  std::sort(truth.removed.begin(), truth.removed.end(), [](const auto& a, const auto& c) { return a.node < c.node; });
  std::vector<std::string> names;
  for (const auto& r : truth.removed) names.push_back(r.node);
  auto [val, test] = split_validation_test(std::move(names), validation_fraction, rng());
  truth.validation = std::move(val);
  truth.test = std::move(test);
  return {b.build(), std::move(truth)};
}

}  // namespace kgsum
