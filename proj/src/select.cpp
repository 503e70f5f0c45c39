#include "kgsum/miner.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "kgsum/error.hpp"

namespace kgsum {

// --- qualification ---------------------------------------------------------

std::size_t StartCounter::count(std::span<const LabelId> sorted_labels) {
  std::vector<LabelId> key(sorted_labels.begin(), sorted_labels.end());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto n = g_.count_with_all(sorted_labels);
  cache_.emplace(std::move(key), n);
  return n;
}

bool qualify(Candidate& c, const KnowledgeGraph& g, StartCounter& counter) {
  const auto& correct = c.assertions.correct_starts;
  if (correct.empty()) return false;
  auto first = g.labels(correct.front());
  std::vector<LabelId> shared(first.begin(), first.end());
  for (std::size_t i = 1; i < correct.size() && shared.size() > c.rule.root_labels.size(); ++i) {
    auto ls = g.labels(correct[i]);
    std::vector<LabelId> next;
    std::set_intersection(shared.begin(), shared.end(), ls.begin(), ls.end(), std::back_inserter(next));
    shared = std::move(next);
  }
  if (shared.size() <= c.rule.root_labels.size()) return false;

  // Same correct starts, coverage and traversals: only the root code and the
  // exception term change.
  const auto starts = counter.count(shared);
  const Bits traversal = c.assertion_bits - exception_bits(c.assertions.num_assertions, c.assertions.num_exceptions());
  Rule qualified = c.rule;
  qualified.root_labels = shared;
  const Bits new_rule = rule_bits(qualified, g);
  const Bits new_exceptions = exception_bits(starts, starts - correct.size());
  if (new_rule + new_exceptions + traversal > c.bits()) return false;

  c.rule = std::move(qualified);
  c.assertions.num_assertions = starts;
  c.rule_bits = new_rule;
  c.assertion_bits = new_exceptions + traversal;
  return true;
}

bool qualify(Candidate& c, const KnowledgeGraph& g) {
  StartCounter counter(g);
  return qualify(c, g, counter);
}

namespace {

// Keeps cands[keep[i]] in order and rewrites reverse links through old->new.
void compact(std::vector<Candidate>& cands, const std::vector<std::size_t>& survivor_of) {
  std::vector<std::size_t> new_index(cands.size(), kNoPartner);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (survivor_of[i] == i) {
      new_index[i] = out.size();
      out.push_back(std::move(cands[i]));
    }
  for (auto& c : out) {
    if (c.reverse == kNoPartner) continue;
    c.reverse = new_index[survivor_of[c.reverse]];
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].reverse == i) out[i].reverse = kNoPartner;
  cands = std::move(out);
}

}  // namespace

void qualify_all(std::vector<Candidate>& cands, const KnowledgeGraph& g) {
  StartCounter counter(g);
  for (auto& c : cands) qualify(c, g, counter);

  // Merge candidates that became the same rule; the earliest survives.
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    int c = compare(cands[a].rule, cands[b].rule);
    return c != 0 ? c < 0 : a < b;
  });
  std::vector<std::size_t> survivor_of(cands.size());
  std::iota(survivor_of.begin(), survivor_of.end(), std::size_t{0});
  for (std::size_t i = 1; i < order.size(); ++i)
    if (compare(cands[order[i]].rule, cands[order[i - 1]].rule) == 0) survivor_of[order[i]] = survivor_of[order[i - 1]];
  compact(cands, survivor_of);
}

// --- ranking ---------------------------------------------------------------

void rank(std::vector<Candidate>& cands, const KnowledgeGraph& g) {
  std::vector<std::string> roots(cands.size()), descs(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    roots[i] = root_key(cands[i].rule, g);
    descs[i] = describe(cands[i].rule, g);
  }
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = cands[a];
    const auto& y = cands[b];
    if (x.gain != y.gain) return x.gain > y.gain;
    if (x.assertions.num_correct() != y.assertions.num_correct())
      return x.assertions.num_correct() > y.assertions.num_correct();
    if (roots[a] != roots[b]) return roots[a] < roots[b];
    if (descs[a] != descs[b]) return descs[a] < descs[b];
    return a < b;
  });
  std::vector<std::size_t> new_index(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_index[order[i]] = i;
  std::vector<Candidate> out;
  out.reserve(cands.size());
  for (auto i : order) {
    out.push_back(std::move(cands[i]));
    if (out.back().reverse != kNoPartner) out.back().reverse = new_index[out.back().reverse];
  }
  cands = std::move(out);
}

// --- selection -------------------------------------------------------------

Model select(const KnowledgeGraph& g, std::span<const Candidate> ranked, int max_passes) {
  if (max_passes < 1) throw ConfigError("max_passes must be >= 1");
  Model model(g);
  std::vector<char> taken(ranked.size(), 0);
  Bits error_now = model.error_bits();
  const auto& cov = model.coverage();

  auto delta_of = [&](const Candidate& c) {
    auto gain = cov.preview(c.assertions);
    return c.bits() + error_bits(g, cov.modeled_edges() + gain.edges, cov.modeled_labels() + gain.labels) - error_now;
  };

  for (int pass = 0; pass < max_passes; ++pass) {
    bool added = false;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (taken[i]) continue;
      std::size_t pick = i;
      Bits d = delta_of(ranked[i]);
      const auto j = ranked[i].reverse;
      if (j != kNoPartner && !taken[j]) {
        Bits dj = delta_of(ranked[j]);
        if (dj < d) {
          pick = j;
          d = dj;
        }
      }
      if (!(d < 0.0)) continue;
      const Bits before = model.total_bits();
      const auto rules_before = model.size();
      model.add(to_model_rule(ranked[pick]));
      taken[pick] = 1;
      error_now = model.error_bits();
      model.record({StepKind::Select, before, model.total_bits(), rules_before, model.size()});
      added = true;
    }
    if (!added) break;
  }
  return model;
}

// --- pipeline --------------------------------------------------------------

RefineMode refine_mode_from_string(const std::string& s) {
  if (s == "none") return RefineMode::None;
  if (s == "merge") return RefineMode::Merge;
  if (s == "nest") return RefineMode::Nest;
  throw ConfigError("unknown refine mode '" + s + "' (expected none|merge|nest)");
}

const char* to_string(RefineMode m) {
  switch (m) {
    case RefineMode::None: return "none";
    case RefineMode::Merge: return "merge";
    case RefineMode::Nest: return "nest";
  }
  return "none";
}

namespace {

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

MiningResult summarize(const KnowledgeGraph& g, const MinerOptions& opts) {
  if (opts.max_passes < 1) throw ConfigError("max_passes must be >= 1");
  Stopwatch clock;
  PhaseTimes t;
  auto cands = generate_candidates(g, opts.candidates);
  t.generate = clock.lap();
  qualify_all(cands, g);
  std::erase_if(cands, [](const Candidate& c) { return c.rule.root_labels.empty() || c.assertions.num_assertions == 0; });
  t.qualify = clock.lap();
  rank(cands, g);
  t.rank = clock.lap();
  Model model = select(g, cands, opts.max_passes);
  t.select = clock.lap();
  if (opts.refine != RefineMode::None) {
    refine_merge(model);
    t.merge = clock.lap();
  }
  if (opts.refine == RefineMode::Nest) {
    refine_nest(model);
    t.nest = clock.lap();
  }
  return MiningResult{std::move(model), cands.size(), t};
}

// --- baselines -------------------------------------------------------------

namespace {

template <class Key>
Model top_k(const KnowledgeGraph& g, std::span<const Candidate> cands, std::size_t k, Key key) {
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(cands[a]) > key(cands[b]); });
  Model model(g);
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) model.add(to_model_rule(cands[order[i]]));
  return model;
}

}  // namespace

Model freq_select(const KnowledgeGraph& g, std::span<const Candidate> cands, std::size_t k) {
  if (k < 1) throw ConfigError("top-k must be >= 1");
  return top_k(g, cands, k, [](const Candidate& c) { return c.assertions.num_correct(); });
}

Model coverage_select(const KnowledgeGraph& g, std::span<const Candidate> cands, std::size_t k) {
  if (k < 1) throw ConfigError("top-k must be >= 1");
  return top_k(g, cands, k, [](const Candidate& c) { return c.assertions.covered_edges.size(); });
}

}  // namespace kgsum
