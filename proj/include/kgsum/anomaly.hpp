#pragma once

#include <span>
#include <vector>

#include "kgsum/graph.hpp"
#include "kgsum/model.hpp"

namespace kgsum {

// Per-node exception cost: each rule's log2 C(|A|, |A_xi|) split evenly
// over its exceptions. Parallel over rules, accumulated in rule order.
std::vector<Bits> node_scores(const Model& model);
// Reference: for each node, walks every rule whose root it carries.
std::vector<Bits> node_scores_serial(const Model& model);

// Score of one node; DomainError for ids outside the graph.
Bits node_score(const Model& model, NodeId v);

// Share of the negative edge error charged to each unmodeled edge. With no
// unmodeled edge in the graph, an outside edge is charged what it would cost
// to transmit alone, log2(|V|^2 |L_E| - |A_M|).
Bits unmodeled_edge_share(const Model& model);

// Scores edges against a model. Endpoints unknown to the graph score 0 and
// edges absent from the graph count as unmodeled.
class EdgeScorer {
 public:
  explicit EdgeScorer(const Model& model);
  EdgeScorer(const Model& model, std::vector<Bits> node_scores);

  Bits node(NodeId v) const { return v < node_scores_.size() ? node_scores_[v] : 0.0; }
  bool modeled(const Triple& t) const;
  Bits score(const Triple& t) const;
  Bits unmodeled_share() const { return share_; }

 private:
  const Model* model_;
  std::vector<Bits> node_scores_;
  Bits share_;
};

std::vector<Bits> score_edges(const EdgeScorer& scorer, std::span<const Triple> edges);
std::vector<Bits> score_edges_serial(const EdgeScorer& scorer, std::span<const Triple> edges);

struct RankedEdge {
  std::size_t index;  // position in the input sequence
  Bits score;
};

// Descending by score; ties keep input order.
std::vector<RankedEdge> rank_edges(std::span<const Bits> scores);
std::vector<RankedEdge> rank_edges(std::span<const Triple> edges, const Model& model);

}  // namespace kgsum
