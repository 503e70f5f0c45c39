#include "kgsum/rule.hpp"

#include <algorithm>
#include <unordered_map>

#include "kgsum/error.hpp"

namespace kgsum {

bool Rule::is_atomic() const { return children.size() == 1 && children.front().rule.is_leaf(); }

std::size_t Rule::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.rule.size();
  return n;
}

std::size_t Rule::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, 1 + c.rule.depth());
  return d;
}

int compare(const Rule& a, const Rule& b) {
  if (a.root_labels != b.root_labels) return a.root_labels < b.root_labels ? -1 : 1;
  auto n = std::min(a.children.size(), b.children.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a.children[i], b.children[i]); c != 0) return c;
  if (a.children.size() != b.children.size()) return a.children.size() < b.children.size() ? -1 : 1;
  return 0;
}

int compare(const Child& a, const Child& b) {
  if (a.predicate != b.predicate) return a.predicate < b.predicate ? -1 : 1;
  if (a.direction != b.direction) return a.direction < b.direction ? -1 : 1;
  return compare(a.rule, b.rule);
}

bool operator==(const Rule& a, const Rule& b) { return compare(a, b) == 0; }
bool operator==(const Child& a, const Child& b) { return compare(a, b) == 0; }

Rule leaf_rule(std::vector<LabelId> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return Rule{std::move(labels), {}};
}

Rule atomic_rule(LabelId root, PredId p, Direction d, LabelId child) {
  Rule r{{root}, {}};
  r.children.push_back(Child{p, d, Rule{{child}, {}}});
  return r;
}

Rule canonicalize(Rule rule) {
  std::sort(rule.root_labels.begin(), rule.root_labels.end());
  rule.root_labels.erase(std::unique(rule.root_labels.begin(), rule.root_labels.end()), rule.root_labels.end());
  for (auto& c : rule.children) c.rule = canonicalize(std::move(c.rule));
  std::sort(rule.children.begin(), rule.children.end(), [](const Child& a, const Child& b) { return compare(a, b) < 0; });
  return rule;
}

namespace {

void collect_atoms(const Rule& r, std::vector<Rule>& out) {
  for (const auto& c : r.children) {
    Rule a{r.root_labels, {}};
    a.children.push_back(Child{c.predicate, c.direction, Rule{c.rule.root_labels, {}}});
    out.push_back(std::move(a));
    collect_atoms(c.rule, out);
  }
}

void collect_paths(const Rule& r, RulePath& prefix, std::vector<RulePath>& out) {
  for (std::size_t i = 0; i < r.children.size(); ++i) {
    prefix.push_back(i);
    out.push_back(prefix);
    collect_paths(r.children[i].rule, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Rule> atoms(const Rule& rule) {
  std::vector<Rule> out;
  collect_atoms(rule, out);
  return out;
}

const Rule& rule_at(const Rule& rule, std::span<const std::size_t> path) {
  const Rule* r = &rule;
  for (auto i : path) r = &r->children.at(i).rule;
  return *r;
}

Rule& rule_at(Rule& rule, std::span<const std::size_t> path) {
  Rule* r = &rule;
  for (auto i : path) r = &r->children.at(i).rule;
  return *r;
}

std::vector<RulePath> inner_paths(const Rule& rule) {
  std::vector<RulePath> out;
  RulePath prefix;
  collect_paths(rule, prefix, out);
  return out;
}

bool AssertionSet::is_correct(NodeId v) const {
  return std::binary_search(correct_starts.begin(), correct_starts.end(), v);
}

std::vector<NodeId> AssertionSet::exception_starts(const Rule& rule, const KnowledgeGraph& g) const {
  auto starts = g.nodes_with_all(rule.root_labels);
  std::vector<NodeId> out;
  out.reserve(num_exceptions());
  std::set_difference(starts.begin(), starts.end(), correct_starts.begin(), correct_starts.end(),
                      std::back_inserter(out));
  return out;
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<NodeId, const Rule*>& k) const noexcept {
    return std::hash<const void*>{}(k.second) * 1000003u ^ k.first;
  }
};

// Recursive traversal of one assertion. Appends what it reveals to the
// scratch buffers; the caller discards them when the start turns out to be
// an exception.
class Traversal {
 public:
  explicit Traversal(const KnowledgeGraph& g) : g_(g) {}

  void reset() {
    edges.clear();
    labels.clear();
    counts.clear();
    done_.clear();
  }

  bool visit(NodeId v, const Rule& r) {
    if (r.children.empty()) return true;
    auto key = std::make_pair(v, &r);
    if (auto it = done_.find(key); it != done_.end()) return it->second;
    bool ok = expand(v, r);
    done_.emplace(key, ok);
    return ok;
  }

  std::vector<EdgeId> edges;
  std::vector<LabelSlot> labels;
  std::vector<std::uint32_t> counts;

 private:
  bool expand(NodeId v, const Rule& r) {
    for (const auto& c : r.children) {
      std::uint32_t m = 0;
      for (const auto& adj : g_.neighbors(v, c.predicate, c.direction)) {
        if (!g_.has_all_labels(adj.node, c.rule.root_labels)) continue;
        ++m;
        edges.push_back(adj.edge);
        for (auto l : c.rule.root_labels) labels.push_back(*g_.label_slot(adj.node, l));
        if (!visit(adj.node, c.rule)) return false;
      }
      if (m == 0) return false;
      counts.push_back(m);
    }
    return true;
  }

  const KnowledgeGraph& g_;
  std::unordered_map<std::pair<NodeId, const Rule*>, bool, PairHash> done_;
};

bool ids_known(const Rule& r, const KnowledgeGraph& g) {
  for (auto l : r.root_labels)
    if (l >= g.num_labels()) return false;
  for (const auto& c : r.children)
    if (c.predicate >= g.num_predicates() || !ids_known(c.rule, g)) return false;
  return true;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

AssertionSet match(const Rule& rule, const KnowledgeGraph& g) {
  AssertionSet out;
  if (rule.root_labels.empty()) throw StructuralError("rule has an empty root label set");
  if (!ids_known(rule, g)) {
    // Unknown ids: starts may still exist (known root labels), but no child can match.
    bool roots_known = std::all_of(rule.root_labels.begin(), rule.root_labels.end(),
                                   [&](LabelId l) { return l < g.num_labels(); });
    out.num_assertions = roots_known ? g.count_with_all(rule.root_labels) : 0;
    if (rule.children.empty()) out.correct_starts = g.nodes_with_all(rule.root_labels);
    return out;
  }
  auto starts = g.nodes_with_all(rule.root_labels);
  out.num_assertions = starts.size();
  Traversal t(g);
  for (auto v : starts) {
    t.reset();
    if (!t.visit(v, rule)) continue;
    out.correct_starts.push_back(v);
    out.covered_edges.insert(out.covered_edges.end(), t.edges.begin(), t.edges.end());
    out.covered_labels.insert(out.covered_labels.end(), t.labels.begin(), t.labels.end());
    out.neighbor_counts.insert(out.neighbor_counts.end(), t.counts.begin(), t.counts.end());
  }
  sort_unique(out.covered_edges);
  sort_unique(out.covered_labels);
  return out;
}

bool satisfies(const Rule& rule, const KnowledgeGraph& g, NodeId v) {
  if (!ids_known(rule, g)) return rule.children.empty();
  Traversal t(g);
  return t.visit(v, rule);
}

std::vector<NodeId> occupants(const Rule& rule, const AssertionSet& aset, std::span<const std::size_t> path,
                              const KnowledgeGraph& g) {
  std::vector<NodeId> frontier = aset.correct_starts;
  const Rule* r = &rule;
  for (auto i : path) {
    const auto& c = r->children.at(i);
    std::vector<NodeId> next;
    for (auto v : frontier)
      for (const auto& adj : g.neighbors(v, c.predicate, c.direction))
        if (g.has_all_labels(adj.node, c.rule.root_labels)) next.push_back(adj.node);
    sort_unique(next);
    frontier = std::move(next);
    r = &c.rule;
  }
  return frontier;
}

namespace {

std::string label_names(std::span<const LabelId> ls, const KnowledgeGraph& g) {
  std::vector<std::string> names;
  for (auto l : ls) names.push_back(l < g.num_labels() ? g.label_names().name(l) : "?");
  std::sort(names.begin(), names.end());
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ',';
    s += names[i];
  }
  return s;
}

void describe_into(const Rule& r, const KnowledgeGraph& g, std::string& out) {
  out += '[';
  out += label_names(r.root_labels, g);
  out += ']';
  if (r.children.empty()) return;
  // Children rendered in name order so the text is independent of interning.
  std::vector<std::string> parts;
  for (const auto& c : r.children) {
    std::string s = " -(";
    s += c.predicate < g.num_predicates() ? g.predicate_names().name(c.predicate) : "?";
    s += ',';
    s += to_string(c.direction);
    s += ")-> ";
    describe_into(c.rule, g, s);
    parts.push_back(std::move(s));
  }
  std::sort(parts.begin(), parts.end());
  out += " {";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ';';
    out += parts[i];
  }
  out += " }";
}

}  // namespace

std::string describe(const Rule& rule, const KnowledgeGraph& g) {
  std::string s;
  describe_into(rule, g, s);
  return s;
}

std::string root_key(const Rule& rule, const KnowledgeGraph& g) { return label_names(rule.root_labels, g); }

}  // namespace kgsum
