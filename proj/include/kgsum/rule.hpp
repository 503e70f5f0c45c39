#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgsum/graph.hpp"

namespace kgsum {

struct Child;

// A rooted labeled pattern: the labels a start node must carry and what must
// hang off it. Rules are finite trees held by value.
struct Rule {
  std::vector<LabelId> root_labels;  // sorted, unique, nonempty
  std::vector<Child> children;

  bool is_leaf() const { return children.empty(); }
  bool is_atomic() const;
  // Total number of rule nodes (root included).
  std::size_t size() const;
  std::size_t depth() const;
};

struct Child {
  PredId predicate = 0;
  Direction direction = Direction::Out;
  Rule rule;
};

// Total order used for canonical child ordering: root labels, then children.
int compare(const Rule& a, const Rule& b);
int compare(const Child& a, const Child& b);
bool operator==(const Rule& a, const Rule& b);
bool operator==(const Child& a, const Child& b);

Rule leaf_rule(std::vector<LabelId> labels);
Rule atomic_rule(LabelId root, PredId p, Direction d, LabelId child);

// Sorts labels and children (by predicate, direction, canonical child) at
// every level. Idempotent.
Rule canonicalize(Rule rule);

// The atomic rules a rule is composed of, one per parent-child link, in
// pre-order. Leaf rules have none.
std::vector<Rule> atoms(const Rule& rule);

// Position of an inner rule node as the sequence of child indices from the root.
using RulePath = std::vector<std::size_t>;

const Rule& rule_at(const Rule& rule, std::span<const std::size_t> path);
Rule& rule_at(Rule& rule, std::span<const std::size_t> path);
// Paths of every non-root rule node, pre-order.
std::vector<RulePath> inner_paths(const Rule& rule);

// Partition of a rule's start nodes into correct assertions and exceptions,
// plus what the correct assertions reveal. Exceptions are the starts minus
// the correct starts and are materialised on demand.
struct AssertionSet {
  std::size_t num_assertions = 0;       // |A^(g)|: nodes carrying all root labels
  std::vector<NodeId> correct_starts;   // sorted
  std::vector<EdgeId> covered_edges;    // sorted, unique
  std::vector<LabelSlot> covered_labels;  // sorted, unique; non-root positions only
  // One entry per (visited node, rule child) expansion inside correct
  // assertions: the number of matching neighbours transmitted there.
  std::vector<std::uint32_t> neighbor_counts;

  std::size_t num_correct() const { return correct_starts.size(); }
  std::size_t num_exceptions() const { return num_assertions - correct_starts.size(); }
  bool is_correct(NodeId v) const;
  std::vector<NodeId> exception_starts(const Rule& rule, const KnowledgeGraph& g) const;
};

// Evaluates the rule from every node carrying its root labels. Ids outside
// the graph's dictionaries match nothing.
AssertionSet match(const Rule& rule, const KnowledgeGraph& g);

// True iff the traversal of `rule` from v succeeds (v need not carry the root labels).
bool satisfies(const Rule& rule, const KnowledgeGraph& g, NodeId v);

// Graph nodes occupying the inner position `path` across the correct
// assertions in `aset`, sorted.
std::vector<NodeId> occupants(const Rule& rule, const AssertionSet& aset, std::span<const std::size_t> path,
                              const KnowledgeGraph& g);

// Human-readable single-line rendering with external names, e.g.
// "[Book] { -(writtenBy,out)-> [Author] }". Deterministic; used for tie-breaks.
std::string describe(const Rule& rule, const KnowledgeGraph& g);
// Root labels as external names, sorted and joined by ','.
std::string root_key(const Rule& rule, const KnowledgeGraph& g);

}  // namespace kgsum
