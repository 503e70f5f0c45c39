#include "kgsum/synthetic.hpp"

#include <cmath>
#include <algorithm>
#include <random>
#include <string>

#include "kgsum/error.hpp"

namespace kgsum {

KnowledgeGraph make_synthetic(const SyntheticSpec& spec) {
  if (spec.types == 0 || spec.nodes < spec.types) throw ConfigError("need at least one node per type");
  if (spec.fanout_min == 0 || spec.fanout_min > spec.fanout_max) throw ConfigError("bad fanout range");
  if (spec.noise < 0) throw ConfigError("noise must be nonnegative");
  std::mt19937_64 rng(spec.seed);
  GraphBuilder b;

  const std::size_t per_type = spec.nodes / spec.types;
  const std::size_t n = per_type * spec.types;
  auto type_of = [&](std::size_t i) { return i % spec.types; };
  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = b.add_node("n" + std::to_string(i));
  std::vector<LabelId> class_label(spec.types);
  std::vector<PredId> pred(spec.types);
  for (std::size_t t = 0; t < spec.types; ++t) {
    class_label[t] = b.add_label_name("T" + std::to_string(t));
    pred[t] = b.add_predicate_name("p" + std::to_string(t));
  }
  std::uniform_int_distribution<std::size_t> sub_dist(0, spec.sublabels ? spec.sublabels - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = type_of(i);
    b.add_label(ids[i], class_label[t]);
    if (spec.sublabels)
      b.add_label(ids[i], b.add_label_name("T" + std::to_string(t) + "." + std::to_string(sub_dist(rng))));
  }

  // Node i has class i % types, so class t's members are t, t + types, ...
  // Out-degrees are drawn per source; targets are dealt from repeatedly
  // shuffled copies of the target class so in-degrees stay balanced.
  std::uniform_int_distribution<std::size_t> fan(spec.fanout_min, spec.fanout_max);
  std::size_t planted = 0;
  for (std::size_t t = 0; t < spec.types; ++t) {
    const auto next = (t + spec.stride) % spec.types;
    std::vector<std::size_t> degree(per_type);
    std::size_t total = 0;
    for (auto& d : degree) total += d = fan(rng);
    std::vector<std::size_t> targets;
    targets.reserve(total + per_type);
    std::vector<std::size_t> round(per_type);
    while (targets.size() < total) {
      for (std::size_t k = 0; k < per_type; ++k) round[k] = k * spec.types + next;
      std::shuffle(round.begin(), round.end(), rng);
      targets.insert(targets.end(), round.begin(), round.end());
    }
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < per_type; ++k) {
      const auto i = k * spec.types + t;
      for (std::size_t e = 0; e < degree[k]; ++e) {
        const auto j = targets[cursor++];
        if (j == i) continue;
        b.add_triple({ids[i], pred[t], ids[j]});
        ++planted;
      }
    }
  }
  const auto extra = static_cast<std::size_t>(std::llround(spec.noise * static_cast<double>(planted)));
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  std::uniform_int_distribution<std::size_t> any_pred(0, spec.types - 1);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto s = any(rng);
    const auto o = any(rng);
    if (s == o) continue;
    b.add_triple({ids[s], pred[any_pred(rng)], ids[o]});
  }
  return b.build();
}

SyntheticSpec synthetic_for_edges(std::size_t edges, std::size_t types, std::size_t sublabels, std::uint64_t seed) {
  SyntheticSpec s;
  s.types = types;
  s.sublabels = sublabels;
  s.seed = seed;
  const double mean_fanout = (static_cast<double>(s.fanout_min) + static_cast<double>(s.fanout_max)) / 2.0;
  s.nodes = std::max(types, static_cast<std::size_t>(std::llround(static_cast<double>(edges) / mean_fanout)));
  return s;
}

}  // namespace kgsum
