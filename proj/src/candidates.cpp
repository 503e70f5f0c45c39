#include "kgsum/miner.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <unordered_set>

#include <boost/sort/spreadsort/integer_sort.hpp>

#include "kgsum/parallel.hpp"

namespace kgsum {

namespace {

struct AtomKey {
  LabelId root;
  PredId predicate;
  Direction direction;
  LabelId child;

  auto operator<=>(const AtomKey&) const = default;
};

AtomKey reversed(const AtomKey& k) { return {k.child, k.predicate, reverse(k.direction), k.root}; }

struct AtomHash {
  std::size_t operator()(const AtomKey& k) const noexcept {
    std::uint64_t h = (std::uint64_t{k.root} << 32 | k.child) * 0x9E3779B97F4A7C15ull;
    return static_cast<std::size_t>(h ^ (std::uint64_t{k.predicate} << 1 | static_cast<std::uint64_t>(k.direction)));
  }
};

// Every (root label, predicate, direction, child label) explaining some edge,
// sorted and unique. Deduplicated through a hash set so only the distinct
// atoms are sorted.
std::vector<AtomKey> enumerate_atoms(const KnowledgeGraph& g, const std::vector<bool>& allowed) {
  std::unordered_set<AtomKey, AtomHash> seen;
  for (const auto& t : g.distinct_edges()) {
    auto ls = g.labels(t.subject);
    auto lo = g.labels(t.object);
    for (auto a : ls) {
      if (!allowed[a]) continue;
      for (auto b : lo) {
        if (!allowed[b]) continue;
        seen.insert({a, t.predicate, Direction::Out, b});
        seen.insert({b, t.predicate, Direction::In, a});
      }
    }
  }
  std::vector<AtomKey> keys(seen.begin(), seen.end());
  std::sort(keys.begin(), keys.end());
  return keys;
}

void link_partners(std::vector<Candidate>& cands, const std::vector<AtomKey>& keys) {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto it = std::lower_bound(keys.begin(), keys.end(), reversed(keys[i]));
    if (it != keys.end() && *it == reversed(keys[i])) cands[i].reverse = static_cast<std::size_t>(it - keys.begin());
  }
}

template <class T>
void sort_unique(std::vector<T>& v) {
  if (!std::is_sorted(v.begin(), v.end())) boost::sort::spreadsort::integer_sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Matches every atom sharing (root, predicate, direction) in one sweep over
// the root label's nodes: each neighbour is inspected once and credited to
// every child label it carries.
void match_group(const KnowledgeGraph& g, std::span<const AtomKey> group, std::span<Candidate> out) {
  const auto& head = group.front();
  std::vector<LabelId> child_labels;
  for (const auto& k : group) child_labels.push_back(k.child);  // sorted by construction

  std::vector<std::uint32_t> local(group.size(), 0);
  std::vector<std::size_t> touched;
  for (auto v : g.nodes_with_label(head.root)) {
    auto nbrs = g.neighbors(v, head.predicate, head.direction);
    if (nbrs.empty()) continue;
    for (const auto& adj : nbrs) {
      auto ls = g.labels(adj.node);
      for (std::size_t j = 0; j < ls.size(); ++j) {
        auto it = std::lower_bound(child_labels.begin(), child_labels.end(), ls[j]);
        if (it == child_labels.end() || *it != ls[j]) continue;
        auto idx = static_cast<std::size_t>(it - child_labels.begin());
        if (local[idx]++ == 0) touched.push_back(idx);
        auto& a = out[idx].assertions;
        a.covered_edges.push_back(adj.edge);
        a.covered_labels.push_back(g.first_label_slot(adj.node) + j);
      }
    }
    for (auto idx : touched) {
      auto& a = out[idx].assertions;
      a.correct_starts.push_back(v);
      a.neighbor_counts.push_back(local[idx]);
      local[idx] = 0;
    }
    touched.clear();
  }
  const auto starts = g.label_count(head.root);
  for (std::size_t i = 0; i < group.size(); ++i) {
    auto& a = out[i].assertions;
    a.num_assertions = starts;
    sort_unique(a.covered_edges);
    sort_unique(a.covered_labels);
    out[i].rule = atomic_rule(group[i].root, group[i].predicate, group[i].direction, group[i].child);
  }
}

}  // namespace

std::vector<bool> allowed_labels(const KnowledgeGraph& g, std::optional<std::size_t> label_cap) {
  std::vector<bool> allowed(g.num_labels(), true);
  if (!label_cap || *label_cap >= g.num_labels()) return allowed;
  std::vector<LabelId> order(g.num_labels());
  std::iota(order.begin(), order.end(), LabelId{0});
  std::sort(order.begin(), order.end(), [&](LabelId a, LabelId b) {
    if (g.label_count(a) != g.label_count(b)) return g.label_count(a) > g.label_count(b);
    return g.label_names().name(a) < g.label_names().name(b);
  });
  std::fill(allowed.begin(), allowed.end(), false);
  for (std::size_t i = 0; i < *label_cap; ++i) allowed[order[i]] = true;
  return allowed;
}

void cost_candidate(Candidate& c, const KnowledgeGraph& g) {
  c.rule_bits = rule_bits(c.rule, g);
  c.assertion_bits = assertion_bits(c.assertions, g);
  c.gain = error_bits(g, 0, 0) - error_bits(g, c.assertions.covered_edges.size(), c.assertions.covered_labels.size());
}

ModelRule to_model_rule(const Candidate& c) {
  ModelRule m;
  m.rule = c.rule;
  m.assertions = c.assertions;
  m.rule_bits = c.rule_bits;
  m.assertion_bits = c.assertion_bits;
  return m;
}

std::vector<Candidate> generate_candidates(const KnowledgeGraph& g, const CandidateOptions& opts) {
  const auto keys = enumerate_atoms(g, allowed_labels(g, opts.label_cap));
  std::vector<Candidate> cands(keys.size());

  // Group boundaries: runs of equal (root, predicate, direction).
  std::vector<std::size_t> bounds;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (i == 0 || std::tie(keys[i].root, keys[i].predicate, keys[i].direction) !=
                      std::tie(keys[i - 1].root, keys[i - 1].predicate, keys[i - 1].direction))
      bounds.push_back(i);
  bounds.push_back(keys.size());

  const auto num_groups = static_cast<std::int64_t>(bounds.size() - 1);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t gi = 0; gi < num_groups; ++gi) {
    const auto lo = bounds[static_cast<std::size_t>(gi)];
    const auto hi = bounds[static_cast<std::size_t>(gi) + 1];
    match_group(g, std::span(keys).subspan(lo, hi - lo), std::span(cands).subspan(lo, hi - lo));
  }

  const auto n = static_cast<std::int64_t>(cands.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) cost_candidate(cands[static_cast<std::size_t>(i)], g);

  link_partners(cands, keys);
  return cands;
}

std::vector<Candidate> generate_candidates_serial(const KnowledgeGraph& g, const CandidateOptions& opts) {
  const auto keys = enumerate_atoms(g, allowed_labels(g, opts.label_cap));
  std::vector<Candidate> cands;
  cands.reserve(keys.size());
  for (const auto& k : keys) {
    Candidate c;
    c.rule = atomic_rule(k.root, k.predicate, k.direction, k.child);
    c.assertions = match(c.rule, g);
    cost_candidate(c, g);
    cands.push_back(std::move(c));
  }
  link_partners(cands, keys);
  return cands;
}

}  // namespace kgsum
