#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgsum {

using NodeId = std::uint32_t;
using LabelId = std::uint32_t;
using PredId = std::uint32_t;
// Index of a distinct (s, p, o) triple.
using EdgeId = std::uint32_t;
// Index of a (node, label) pair, i.e. of a 1 in the label matrix.
using LabelSlot = std::uint64_t;

// Id used for names that are not in a graph's dictionaries; matches nothing.
inline constexpr std::uint32_t kUnknownId = 0xffffffffu;

enum class Direction : std::uint8_t { Out = 0, In = 1 };

inline Direction reverse(Direction d) { return d == Direction::Out ? Direction::In : Direction::Out; }
const char* to_string(Direction d);
Direction direction_from_string(std::string_view s);

struct Triple {
  NodeId subject = 0;
  PredId predicate = 0;
  NodeId object = 0;

  auto operator<=>(const Triple&) const = default;
};

// Bidirectional map between external identifiers and dense ids.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  // kUnknownId when absent.
  std::uint32_t id_or_unknown(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
};

// One entry of a node's adjacency list: the predicate, the node on the other
// end, and the distinct-triple id of the edge.
struct Adjacent {
  PredId predicate;
  NodeId node;
  EdgeId edge;
};

struct GraphStats {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;  // multiset, as given
  std::size_t num_distinct_edges = 0;
  std::size_t num_labels = 0;
  std::size_t num_predicates = 0;
  std::size_t num_label_assignments = 0;
  std::size_t phi_max = 0;
  double avg_labels_per_node = 0.0;
  double median_labels_per_node = 0.0;
  std::size_t collapsed_duplicates = 0;
};

class GraphBuilder;

// Immutable labeled directed multigraph. Frequencies (n_p, |E|) come from the
// edge multiset; adjacency and coverage operate on distinct triples.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  std::size_t num_nodes() const { return node_names_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  std::size_t num_distinct_edges() const { return edges_.size(); }
  std::size_t num_labels() const { return label_names_.size(); }
  std::size_t num_predicates() const { return pred_names_.size(); }
  std::size_t num_label_assignments() const { return label_data_.size(); }
  std::size_t phi_max() const { return phi_max_; }
  std::size_t collapsed_duplicates() const { return num_edges_ - edges_.size(); }

  const SymbolTable& node_names() const { return node_names_; }
  const SymbolTable& label_names() const { return label_names_; }
  const SymbolTable& predicate_names() const { return pred_names_; }

  // Sorted label ids of v.
  std::span<const LabelId> labels(NodeId v) const {
    return {label_data_.data() + label_offsets_[v], label_data_.data() + label_offsets_[v + 1]};
  }
  // True iff every id in `sorted_labels` is carried by v.
  bool has_all_labels(NodeId v, std::span<const LabelId> sorted_labels) const;
  std::optional<LabelSlot> label_slot(NodeId v, LabelId l) const;
  LabelSlot first_label_slot(NodeId v) const { return label_offsets_[v]; }

  // Sorted nodes carrying l (the label index).
  std::span<const NodeId> nodes_with_label(LabelId l) const {
    return {label_nodes_.data() + label_node_offsets_[l], label_nodes_.data() + label_node_offsets_[l + 1]};
  }
  std::size_t label_count(LabelId l) const { return label_node_offsets_[l + 1] - label_node_offsets_[l]; }
  std::size_t predicate_count(PredId p) const { return pred_counts_[p]; }

  // Nodes carrying every label of `sorted_labels`, ascending.
  std::vector<NodeId> nodes_with_all(std::span<const LabelId> sorted_labels) const;
  std::size_t count_with_all(std::span<const LabelId> sorted_labels) const;

  // Adjacency sorted by (predicate, node).
  std::span<const Adjacent> neighbors(NodeId v, Direction d) const;
  std::span<const Adjacent> neighbors(NodeId v, PredId p, Direction d) const;

  std::span<const Triple> distinct_edges() const { return edges_; }
  const Triple& edge(EdgeId e) const { return edges_[e]; }
  std::optional<EdgeId> find_edge(const Triple& t) const;
  // Number of times the triple occurred in the input.
  std::uint32_t multiplicity(EdgeId e) const { return edge_mult_[e]; }

  GraphStats stats() const;

 private:
  friend class GraphBuilder;

  SymbolTable node_names_;
  SymbolTable label_names_;
  SymbolTable pred_names_;

  std::vector<std::uint64_t> label_offsets_{0};
  std::vector<LabelId> label_data_;
  std::vector<std::size_t> label_node_offsets_{0};
  std::vector<NodeId> label_nodes_;
  std::vector<std::size_t> pred_counts_;

  std::vector<Triple> edges_;  // distinct, sorted
  std::vector<std::uint32_t> edge_mult_;
  std::size_t num_edges_ = 0;
  std::size_t phi_max_ = 0;

  std::vector<std::size_t> out_offsets_{0};
  std::vector<Adjacent> out_adj_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Adjacent> in_adj_;
};

// Mutable staging area for a graph. Ids handed out by the builder are only
// meaningful inside the builder: build() drops removed nodes and unused
// labels/predicates and renumbers, preserving first-appearance order.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  // Starts from the full content of g with g's ids.
  explicit GraphBuilder(const KnowledgeGraph& g);

  NodeId add_node(std::string_view name);
  LabelId add_label_name(std::string_view name) { return labels_.intern(name); }
  PredId add_predicate_name(std::string_view name) { return preds_.intern(name); }

  void add_triple(std::string_view s, std::string_view p, std::string_view o);
  void add_triple(const Triple& t) { edges_.push_back(t); }
  void add_label(std::string_view node, std::string_view label);
  void add_label(NodeId v, LabelId l);
  bool remove_label(NodeId v, LabelId l);
  // Marks v removed; build() drops it together with every incident edge.
  void remove_node(NodeId v) { removed_[v] = true; }
  // Erases every multiset edge matching `pred`; returns how many were erased.
  template <class Pred>
  std::size_t remove_edges_if(Pred pred) {
    auto before = edges_.size();
    std::erase_if(edges_, pred);
    return before - edges_.size();
  }

  std::size_t num_nodes() const { return nodes_.size(); }
  const std::vector<Triple>& edges() const { return edges_; }
  const std::vector<LabelId>& labels(NodeId v) const { return node_labels_[v]; }
  bool removed(NodeId v) const { return removed_[v]; }
  const SymbolTable& node_names() const { return nodes_; }
  const SymbolTable& label_names() const { return labels_; }
  const SymbolTable& predicate_names() const { return preds_; }

  KnowledgeGraph build() const;

 private:
  SymbolTable nodes_;
  SymbolTable labels_;
  SymbolTable preds_;
  std::vector<Triple> edges_;
  std::vector<std::vector<LabelId>> node_labels_;  // sorted, unique
  std::vector<bool> removed_;
};

// Parses `s<TAB>p<TAB>o` and `node<TAB>label` streams. Lines starting with '#'
// and blank lines are skipped. Throws ParseError with the 1-based line number.
KnowledgeGraph load_graph(std::istream& triples, std::istream& labels);
KnowledgeGraph load_graph_files(const std::string& triples_path, const std::string& labels_path);

// Writes the graph back in the load format (one line per multiset edge and per
// label assignment).
void write_graph(const KnowledgeGraph& g, std::ostream& triples, std::ostream& labels);

// A triple by external names, for edges that may not exist in a graph.
struct NamedTriple {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const NamedTriple&) const = default;
};

std::vector<NamedTriple> read_triples(std::istream& in);
std::vector<NamedTriple> read_triples_file(const std::string& path);
void write_triples(std::span<const NamedTriple> triples, std::ostream& out);

// Ids in g, kUnknownId for names g does not know.
Triple resolve(const NamedTriple& t, const KnowledgeGraph& g);
NamedTriple name_of(const Triple& t, const KnowledgeGraph& g);

}  // namespace kgsum
