#pragma once

#include <cstdint>
#include <vector>

#include "kgsum/graph.hpp"
#include "kgsum/rule.hpp"

namespace kgsum {

// Description lengths in (fractional) bits.
using Bits = double;

// Rissanen's universal code for positive integers:
// log2(c0) + log2 n + log2 log2 n + ... (positive terms only), c0 = 2.865064.
Bits universal_int_bits(std::uint64_t n);

// log2 C(n, k). Exact summation for n <= 1000, log-gamma differences beyond.
Bits log2_binomial(std::uint64_t n, std::uint64_t k);
// Same for universes that may not fit an integer (|V|^2 |L_E|).
Bits log2_binomial(long double n, long double k);

// Root label set: log2 |L_V| + sum of -log2(n_l / |V|).
Bits label_set_bits(std::span<const LabelId> labels, const KnowledgeGraph& g);

// L(g): root labels, child count, and per child predicate + direction + child rule.
Bits rule_bits(const Rule& rule, const KnowledgeGraph& g);

// Exception term: log2 |A| + log2 C(|A|, |A_xi|).
Bits exception_bits(std::size_t num_assertions, std::size_t num_exceptions);

// Traversal term summed over correct assertions: per recorded expansion,
// log2 |V| + log2 C(|V| - 1, m).
Bits traversal_bits(const std::vector<std::uint32_t>& neighbor_counts, std::size_t num_nodes);

// L(A^(g)) = exception term + traversal term.
Bits assertion_bits(const AssertionSet& aset, const KnowledgeGraph& g);

// log2(2 |L_V|^2 |L_E| + 1): the number of rules.
Bits rule_count_bits(const KnowledgeGraph& g);

// Which 1s of the adjacency tensor and label matrix the model explains.
// Reference counted so rules can be added and removed incrementally.
class Coverage {
 public:
  Coverage() = default;
  explicit Coverage(const KnowledgeGraph& g);

  struct Gain {
    std::size_t edges = 0;
    std::size_t labels = 0;
  };

  void add(const AssertionSet& aset);
  void remove(const AssertionSet& aset);
  // Edges and labels `aset` would newly explain.
  Gain preview(const AssertionSet& aset) const;

  std::size_t modeled_edges() const { return modeled_edges_; }
  std::size_t modeled_labels() const { return modeled_labels_; }
  std::size_t total_edges() const { return edge_refs_.size(); }
  std::size_t total_labels() const { return label_refs_.size(); }
  std::size_t unmodeled_edges() const { return total_edges() - modeled_edges_; }
  std::size_t unmodeled_labels() const { return total_labels() - modeled_labels_; }
  bool edge_modeled(EdgeId e) const { return edge_refs_[e] > 0; }
  bool label_modeled(LabelSlot s) const { return label_refs_[s] > 0; }

  std::vector<EdgeId> modeled_edge_ids() const;
  std::vector<LabelSlot> modeled_label_slots() const;

 private:
  std::vector<std::uint32_t> edge_refs_;
  std::vector<std::uint32_t> label_refs_;
  std::size_t modeled_edges_ = 0;
  std::size_t modeled_labels_ = 0;
};

// Universe sizes of the error binomials: |L_V| |V| and |V|^2 |L_E|.
long double label_universe(const KnowledgeGraph& g);
long double edge_universe(const KnowledgeGraph& g);

// L(G|M) given how many distinct edges and label assignments are modeled.
Bits error_bits(const KnowledgeGraph& g, std::size_t modeled_edges, std::size_t modeled_labels);
Bits error_bits(const KnowledgeGraph& g, const Coverage& cov);
// The edge half alone, log2 C(|V|^2|L_E| - |A_M|, |A^-|).
Bits edge_error_bits(const KnowledgeGraph& g, std::size_t modeled_edges);

struct CostBreakdown {
  Bits model = 0;  // L(M), rule-count term included
  Bits error = 0;  // L(G|M)
  Bits total() const { return model + error; }
};

// L(G, M) from scratch for a set of rules: matches each rule, unions the
// coverage and sums every term. A rule with no assertion raises DomainError.
CostBreakdown total_cost(const KnowledgeGraph& g, const std::vector<Rule>& rules);

}  // namespace kgsum
