#include <algorithm>
#include <map>
#include <tuple>

#include "kgsum/miner.hpp"

namespace kgsum {

namespace {

// Union of two child lists, duplicates dropped.
void add_children(Rule& into, const std::vector<Child>& extra) {
  for (const auto& c : extra)
    if (std::find(into.children.begin(), into.children.end(), c) == into.children.end()) into.children.push_back(c);
}

double jaccard(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::size_t index_of(const Model& m, std::uint64_t id) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.rules()[i].id == id) return i;
  return kNoPartner;
}

}  // namespace

void refine_merge(Model& model) {
  const auto& g = model.graph();
  // Group key: root labels and correct starts; value: rule ids in model order.
  std::map<std::pair<std::vector<LabelId>, std::vector<NodeId>>, std::vector<std::uint64_t>> groups;
  std::vector<std::pair<std::vector<LabelId>, std::vector<NodeId>>> key_order;
  for (const auto& r : model.rules()) {
    auto key = std::make_pair(r.rule.root_labels, r.assertions.correct_starts);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) key_order.push_back(key);
    it->second.push_back(r.id);
  }
  for (const auto& key : key_order) {
    const auto& ids = groups[key];
    if (ids.size() < 2) continue;
    std::vector<std::size_t> idx;
    for (auto id : ids) idx.push_back(index_of(model, id));
    Rule merged{key.first, {}};
    for (auto i : idx) add_children(merged, model.rules()[i].rule.children);
    ModelRule candidate = make_model_rule(std::move(merged), g);
    if (candidate.assertions.num_assertions == 0) continue;
    const Bits before = model.total_bits();
    const auto rules_before = model.size();
    if (model.delta(idx, &candidate) > 0.0) continue;
    model.replace(idx, std::move(candidate));
    model.record({StepKind::Merge, before, model.total_bits(), rules_before, model.size()});
  }
}

namespace {

struct NestPair {
  double similarity;
  std::uint64_t inner;  // rule id of g_in
  RulePath path;        // inner position within g_in
  std::uint64_t root;   // rule id of g_rt

  auto order_key() const { return std::tie(inner, path, root); }
};

bool before(const NestPair& a, const NestPair& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.order_key() < b.order_key();
}

// Pairs with r as g_in against every other rule as g_rt, and (if both) the reverse.
void collect_pairs(const Model& model, const ModelRule& in, const ModelRule& rt, std::vector<NestPair>& out) {
  if (in.id == rt.id) return;
  const auto& g = model.graph();
  for (auto& path : inner_paths(in.rule)) {
    if (rule_at(in.rule, path).root_labels != rt.rule.root_labels) continue;
    auto occ = occupants(in.rule, in.assertions, path, g);
    double j = jaccard(occ, rt.assertions.correct_starts);
    if (j > 0.0) out.push_back({j, in.id, path, rt.id});
  }
}

}  // namespace

void refine_nest(Model& model) {
  const auto& g = model.graph();
  std::vector<NestPair> pairs;
  for (const auto& a : model.rules())
    for (const auto& b : model.rules()) collect_pairs(model, a, b, pairs);
  std::sort(pairs.begin(), pairs.end(), before);

  std::size_t next = 0;
  while (next < pairs.size()) {
    const NestPair p = pairs[next++];
    const auto in_idx = index_of(model, p.inner);
    const auto rt_idx = index_of(model, p.root);
    if (in_idx == kNoPartner || rt_idx == kNoPartner) continue;

    Rule composed = model.rules()[in_idx].rule;
    add_children(rule_at(composed, p.path), model.rules()[rt_idx].rule.children);
    ModelRule candidate = make_model_rule(std::move(composed), g);
    if (candidate.assertions.num_assertions == 0) continue;
    const std::size_t remove[] = {in_idx, rt_idx};
    if (!(model.delta(remove, &candidate) < 0.0)) continue;

    const Bits total_before = model.total_bits();
    const auto rules_before = model.size();
    model.replace(remove, std::move(candidate));
    model.record({StepKind::Nest, total_before, model.total_bits(), rules_before, model.size()});

    // Drop untried pairs that referenced the consumed rules, add those of the
    // composed rule, and re-sort what is left.
    const auto& fresh = model.rules()[std::min(in_idx, rt_idx)];
    std::vector<NestPair> rest;
    for (std::size_t i = next; i < pairs.size(); ++i) {
      const auto& q = pairs[i];
      if (q.inner == p.inner || q.inner == p.root || q.root == p.inner || q.root == p.root) continue;
      rest.push_back(q);
    }
    for (const auto& other : model.rules()) {
      collect_pairs(model, fresh, other, rest);
      collect_pairs(model, other, fresh, rest);
    }
    std::sort(rest.begin(), rest.end(), before);
    pairs = std::move(rest);
    next = 0;
  }
}

}  // namespace kgsum
