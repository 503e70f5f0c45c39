#include "kgsum/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgsum/error.hpp"

namespace kgsum {

namespace {

Bits exception_share(const AssertionSet& a) {
  const auto x = a.num_exceptions();
  return x == 0 ? 0.0 : log2_binomial(std::uint64_t{a.num_assertions}, std::uint64_t{x}) / static_cast<Bits>(x);
}

}  // namespace

std::vector<Bits> node_scores(const Model& model) {
  const auto& g = model.graph();
  const auto& rules = model.rules();
  std::vector<std::vector<NodeId>> exceptions(rules.size());
  const auto n = static_cast<std::ptrdiff_t>(rules.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) exceptions[i] = rules[i].assertions.exception_starts(rules[i].rule, g);

  std::vector<Bits> scores(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Bits share = exception_share(rules[i].assertions);
    for (auto v : exceptions[i]) scores[v] += share;
  }
  return scores;
}

std::vector<Bits> node_scores_serial(const Model& model) {
  const auto& g = model.graph();
  std::vector<Bits> scores(g.num_nodes(), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (const auto& r : model.rules())
      if (g.has_all_labels(v, r.rule.root_labels) && !r.assertions.is_correct(v))
        scores[v] += exception_share(r.assertions);
  return scores;
}

Bits node_score(const Model& model, NodeId v) {
  const auto& g = model.graph();
  if (v >= g.num_nodes()) throw DomainError("node id " + std::to_string(v) + " is not in the graph");
  Bits s = 0;
  for (const auto& r : model.rules())
    if (g.has_all_labels(v, r.rule.root_labels) && !r.assertions.is_correct(v)) s += exception_share(r.assertions);
  return s;
}

Bits unmodeled_edge_share(const Model& model) {
  const auto& g = model.graph();
  const auto& cov = model.coverage();
  const long double free = edge_universe(g) - static_cast<long double>(cov.modeled_edges());
  const auto missing = cov.unmodeled_edges();
  if (missing == 0) return free > 0 ? static_cast<Bits>(std::log2(free)) : 0.0;
  return edge_error_bits(g, cov.modeled_edges()) / static_cast<Bits>(missing);
}

EdgeScorer::EdgeScorer(const Model& model) : EdgeScorer(model, node_scores(model)) {}

EdgeScorer::EdgeScorer(const Model& model, std::vector<Bits> scores)
    : model_(&model), node_scores_(std::move(scores)), share_(unmodeled_edge_share(model)) {}

bool EdgeScorer::modeled(const Triple& t) const {
  const auto& g = model_->graph();
  if (t.subject >= g.num_nodes() || t.object >= g.num_nodes() || t.predicate >= g.num_predicates()) return false;
  auto e = g.find_edge(t);
  return e && model_->coverage().edge_modeled(*e);
}

Bits EdgeScorer::score(const Triple& t) const {
  return node(t.subject) + node(t.object) + (modeled(t) ? 0.0 : share_);
}

std::vector<Bits> score_edges(const EdgeScorer& scorer, std::span<const Triple> edges) {
  std::vector<Bits> out(edges.size());
  const auto n = static_cast<std::ptrdiff_t>(edges.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = scorer.score(edges[i]);
  return out;
}

std::vector<Bits> score_edges_serial(const EdgeScorer& scorer, std::span<const Triple> edges) {
  std::vector<Bits> out;
  out.reserve(edges.size());
  for (const auto& t : edges) out.push_back(scorer.score(t));
  return out;
}

std::vector<RankedEdge> rank_edges(std::span<const Bits> scores) {
  std::vector<RankedEdge> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = {i, scores[i]};
  std::stable_sort(out.begin(), out.end(), [](const RankedEdge& a, const RankedEdge& b) { return a.score > b.score; });
  return out;
}

std::vector<RankedEdge> rank_edges(std::span<const Triple> edges, const Model& model) {
  EdgeScorer scorer(model);
  auto scores = score_edges(scorer, edges);
  return rank_edges(scores);
}

}  // namespace kgsum
