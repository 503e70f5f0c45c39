#include "kgsum/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

#include "kgsum/error.hpp"

namespace kgsum {

const char* to_string(Direction d) { return d == Direction::Out ? "out" : "in"; }

Direction direction_from_string(std::string_view s) {
  if (s == "out") return Direction::Out;
  if (s == "in") return Direction::In;
  throw Error("unknown direction '" + std::string(s) + "' (expected out|in)");
}

// --- SymbolTable ---------------------------------------------------------

std::uint32_t SymbolTable::intern(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::find(std::string_view name) const {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::uint32_t SymbolTable::id_or_unknown(std::string_view name) const { return find(name).value_or(kUnknownId); }

// --- KnowledgeGraph ------------------------------------------------------

bool KnowledgeGraph::has_all_labels(NodeId v, std::span<const LabelId> sorted_labels) const {
  auto have = labels(v);
  return std::includes(have.begin(), have.end(), sorted_labels.begin(), sorted_labels.end());
}

std::optional<LabelSlot> KnowledgeGraph::label_slot(NodeId v, LabelId l) const {
  auto have = labels(v);
  auto it = std::lower_bound(have.begin(), have.end(), l);
  if (it == have.end() || *it != l) return std::nullopt;
  return label_offsets_[v] + static_cast<LabelSlot>(it - have.begin());
}

std::vector<NodeId> KnowledgeGraph::nodes_with_all(std::span<const LabelId> sorted_labels) const {
  std::vector<NodeId> out;
  if (sorted_labels.empty()) {
    out.resize(num_nodes());
    std::iota(out.begin(), out.end(), NodeId{0});
    return out;
  }
  for (auto l : sorted_labels)
    if (l >= num_labels()) return out;
  // Scan the rarest label's list and test the rest per node.
  auto rarest = *std::min_element(sorted_labels.begin(), sorted_labels.end(),
                                  [&](LabelId a, LabelId b) { return label_count(a) < label_count(b); });
  for (auto v : nodes_with_label(rarest))
    if (has_all_labels(v, sorted_labels)) out.push_back(v);
  return out;
}

std::size_t KnowledgeGraph::count_with_all(std::span<const LabelId> sorted_labels) const {
  if (sorted_labels.size() == 1) return sorted_labels[0] < num_labels() ? label_count(sorted_labels[0]) : 0;
  return nodes_with_all(sorted_labels).size();
}

std::span<const Adjacent> KnowledgeGraph::neighbors(NodeId v, Direction d) const {
  const auto& off = d == Direction::Out ? out_offsets_ : in_offsets_;
  const auto& adj = d == Direction::Out ? out_adj_ : in_adj_;
  return {adj.data() + off[v], adj.data() + off[v + 1]};
}

std::span<const Adjacent> KnowledgeGraph::neighbors(NodeId v, PredId p, Direction d) const {
  auto all = neighbors(v, d);
  auto lo = std::lower_bound(all.begin(), all.end(), p, [](const Adjacent& a, PredId q) { return a.predicate < q; });
  auto hi = std::upper_bound(lo, all.end(), p, [](PredId q, const Adjacent& a) { return q < a.predicate; });
  return {lo, hi};
}

std::optional<EdgeId> KnowledgeGraph::find_edge(const Triple& t) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), t);
  if (it == edges_.end() || *it != t) return std::nullopt;
  return static_cast<EdgeId>(it - edges_.begin());
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.num_nodes = num_nodes();
  s.num_edges = num_edges();
  s.num_distinct_edges = num_distinct_edges();
  s.num_labels = num_labels();
  s.num_predicates = num_predicates();
  s.num_label_assignments = num_label_assignments();
  s.phi_max = phi_max();
  s.collapsed_duplicates = collapsed_duplicates();
  if (s.num_nodes == 0) return s;
  s.avg_labels_per_node = static_cast<double>(s.num_label_assignments) / static_cast<double>(s.num_nodes);
  std::vector<std::size_t> sizes(s.num_nodes);
  for (NodeId v = 0; v < s.num_nodes; ++v) sizes[v] = labels(v).size();
  std::sort(sizes.begin(), sizes.end());
  auto n = sizes.size();
  s.median_labels_per_node = n % 2 == 1 ? static_cast<double>(sizes[n / 2])
                                        : 0.5 * static_cast<double>(sizes[n / 2 - 1] + sizes[n / 2]);
  return s;
}

// --- GraphBuilder --------------------------------------------------------

GraphBuilder::GraphBuilder(const KnowledgeGraph& g)
    : nodes_(g.node_names_), labels_(g.label_names_), preds_(g.pred_names_), removed_(g.num_nodes(), false) {
  node_labels_.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto ls = g.labels(v);
    node_labels_[v].assign(ls.begin(), ls.end());
  }
  edges_.reserve(g.num_edges());
  for (EdgeId e = 0; e < g.num_distinct_edges(); ++e)
    for (std::uint32_t k = 0; k < g.multiplicity(e); ++k) edges_.push_back(g.edge(e));
}

NodeId GraphBuilder::add_node(std::string_view name) {
  auto id = nodes_.intern(name);
  if (id == node_labels_.size()) {
    node_labels_.emplace_back();
    removed_.push_back(false);
  }
  return id;
}

void GraphBuilder::add_triple(std::string_view s, std::string_view p, std::string_view o) {
  auto sid = add_node(s);
  auto pid = preds_.intern(p);
  auto oid = add_node(o);
  edges_.push_back({sid, pid, oid});
}

void GraphBuilder::add_label(std::string_view node, std::string_view label) {
  auto v = add_node(node);
  add_label(v, labels_.intern(label));
}

void GraphBuilder::add_label(NodeId v, LabelId l) {
  auto& ls = node_labels_[v];
  auto it = std::lower_bound(ls.begin(), ls.end(), l);
  if (it == ls.end() || *it != l) ls.insert(it, l);
}

bool GraphBuilder::remove_label(NodeId v, LabelId l) {
  auto& ls = node_labels_[v];
  auto it = std::lower_bound(ls.begin(), ls.end(), l);
  if (it == ls.end() || *it != l) return false;
  ls.erase(it);
  return true;
}

namespace {

void build_adjacency(std::size_t n, const std::vector<Triple>& edges, Direction d, std::vector<std::size_t>& offsets,
                     std::vector<Adjacent>& adj) {
  offsets.assign(n + 1, 0);
  for (const auto& t : edges) ++offsets[(d == Direction::Out ? t.subject : t.object) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adj.resize(edges.size());
  auto cursor = offsets;
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const auto& t = edges[e];
    auto from = d == Direction::Out ? t.subject : t.object;
    auto to = d == Direction::Out ? t.object : t.subject;
    adj[cursor[from]++] = {t.predicate, to, e};
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(adj.begin() + static_cast<std::ptrdiff_t>(offsets[v]), adj.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]),
              [](const Adjacent& a, const Adjacent& b) { return std::tie(a.predicate, a.node) < std::tie(b.predicate, b.node); });
}

}  // namespace

KnowledgeGraph GraphBuilder::build() const {
  KnowledgeGraph g;

  // Renumber surviving nodes, then labels and predicates that are still used.
  std::vector<NodeId> node_map(nodes_.size(), kUnknownId);
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (!removed_[v]) node_map[v] = g.node_names_.intern(nodes_.name(v));

  std::vector<bool> label_used(labels_.size(), false);
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (!removed_[v])
      for (auto l : node_labels_[v]) label_used[l] = true;
  std::vector<LabelId> label_map(labels_.size(), kUnknownId);
  for (LabelId l = 0; l < labels_.size(); ++l)
    if (label_used[l]) label_map[l] = g.label_names_.intern(labels_.name(l));

  std::vector<Triple> kept;
  kept.reserve(edges_.size());
  std::vector<bool> pred_used(preds_.size(), false);
  for (const auto& t : edges_) {
    if (removed_[t.subject] || removed_[t.object]) continue;
    kept.push_back(t);
    pred_used[t.predicate] = true;
  }
  std::vector<PredId> pred_map(preds_.size(), kUnknownId);
  for (PredId p = 0; p < preds_.size(); ++p)
    if (pred_used[p]) pred_map[p] = g.pred_names_.intern(preds_.name(p));

  const auto n = g.node_names_.size();

  // Labels per node, in new ids.
  std::vector<std::vector<LabelId>> per_node(n);
  for (NodeId v = 0; v < nodes_.size(); ++v) {
    if (removed_[v]) continue;
    auto& out = per_node[node_map[v]];
    for (auto l : node_labels_[v]) out.push_back(label_map[l]);
    std::sort(out.begin(), out.end());
  }
  g.label_offsets_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) {
    g.label_offsets_[v + 1] = g.label_offsets_[v] + per_node[v].size();
    g.phi_max_ = std::max(g.phi_max_, per_node[v].size());
  }
  g.label_data_.reserve(g.label_offsets_[n]);
  for (const auto& ls : per_node) g.label_data_.insert(g.label_data_.end(), ls.begin(), ls.end());

  const auto nl = g.label_names_.size();
  g.label_node_offsets_.assign(nl + 1, 0);
  for (auto l : g.label_data_) ++g.label_node_offsets_[l + 1];
  std::partial_sum(g.label_node_offsets_.begin(), g.label_node_offsets_.end(), g.label_node_offsets_.begin());
  g.label_nodes_.resize(g.label_data_.size());
  {
    auto cursor = g.label_node_offsets_;
    for (NodeId v = 0; v < n; ++v)
      for (auto l : per_node[v]) g.label_nodes_[cursor[l]++] = v;
  }

  // Edge multiset -> predicate counts; distinct triples -> adjacency.
  g.pred_counts_.assign(g.pred_names_.size(), 0);
  std::vector<Triple> all;
  all.reserve(kept.size());
  for (const auto& t : kept) {
    Triple r{node_map[t.subject], pred_map[t.predicate], node_map[t.object]};
    ++g.pred_counts_[r.predicate];
    all.push_back(r);
  }
  g.num_edges_ = all.size();
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    g.edges_.push_back(all[i]);
    g.edge_mult_.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
  build_adjacency(n, g.edges_, Direction::Out, g.out_offsets_, g.out_adj_);
  build_adjacency(n, g.edges_, Direction::In, g.in_offsets_, g.in_adj_);
  return g;
}

// --- I/O -----------------------------------------------------------------

namespace {

// Splits on TAB; strips a trailing '\r'.
std::vector<std::string_view> split_fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool skip_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line.empty() || line.front() == '#';
}

template <class Fn>
void for_each_record(std::istream& in, std::size_t expected, const char* what, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != expected)
      throw ParseError(std::string(what) + ": expected " + std::to_string(expected) + " tab-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    for (auto f : fields)
      if (f.empty()) throw ParseError(std::string(what) + ": empty field", lineno);
    fn(fields);
  }
}

}  // namespace

KnowledgeGraph load_graph(std::istream& triples, std::istream& labels) {
  GraphBuilder b;
  for_each_record(triples, 3, "triple file", [&](const auto& f) { b.add_triple(f[0], f[1], f[2]); });
  for_each_record(labels, 2, "label file", [&](const auto& f) { b.add_label(f[0], f[1]); });
  return b.build();
}

KnowledgeGraph load_graph_files(const std::string& triples_path, const std::string& labels_path) {
  std::ifstream t(triples_path);
  if (!t) throw Error("cannot open triple file '" + triples_path + "'");
  std::ifstream l(labels_path);
  if (!l) throw Error("cannot open label file '" + labels_path + "'");
  return load_graph(t, l);
}

void write_graph(const KnowledgeGraph& g, std::ostream& triples, std::ostream& labels) {
  const auto& nn = g.node_names();
  const auto& pn = g.predicate_names();
  for (EdgeId e = 0; e < g.num_distinct_edges(); ++e) {
    const auto& t = g.edge(e);
    for (std::uint32_t k = 0; k < g.multiplicity(e); ++k)
      triples << nn.name(t.subject) << '\t' << pn.name(t.predicate) << '\t' << nn.name(t.object) << '\n';
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (auto l : g.labels(v)) labels << nn.name(v) << '\t' << g.label_names().name(l) << '\n';
}

std::vector<NamedTriple> read_triples(std::istream& in) {
  std::vector<NamedTriple> out;
  for_each_record(in, 3, "triple file", [&](const auto& f) {
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2])});
  });
  return out;
}

std::vector<NamedTriple> read_triples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open triple file '" + path + "'");
  return read_triples(in);
}

void write_triples(std::span<const NamedTriple> triples, std::ostream& out) {
  for (const auto& t : triples) out << t.subject << '\t' << t.predicate << '\t' << t.object << '\n';
}

Triple resolve(const NamedTriple& t, const KnowledgeGraph& g) {
  return {g.node_names().id_or_unknown(t.subject), g.predicate_names().id_or_unknown(t.predicate),
          g.node_names().id_or_unknown(t.object)};
}

NamedTriple name_of(const Triple& t, const KnowledgeGraph& g) {
  return {g.node_names().name(t.subject), g.predicate_names().name(t.predicate), g.node_names().name(t.object)};
}

}  // namespace kgsum
