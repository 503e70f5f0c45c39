#pragma once

#include <cstdint>

#include "kgsum/graph.hpp"

namespace kgsum {

// A graph with planted regularities. Nodes are split evenly into `types`
// classes; every node of class t has between fanout_min and fanout_max
// out-edges with predicate "p<t>" to nodes of class (t + stride) mod types,
// whose in-degrees are kept balanced. With stride 0 each pattern stays inside
// its class, so a rule in either orientation is rooted at the neighbours of
// any node. Each node carries its class label "T<t>" plus one of `sublabels`
// labels "T<t>.<k>" (none when sublabels is 0). A `noise` fraction of extra
// edges joins random nodes by random predicates.
struct SyntheticSpec {
  std::size_t nodes = 1000;
  std::size_t types = 5;
  std::size_t sublabels = 0;
  std::size_t stride = 0;
  std::size_t fanout_min = 1;
  std::size_t fanout_max = 9;
  double noise = 0.01;
  std::uint64_t seed = 1;
};

KnowledgeGraph make_synthetic(const SyntheticSpec& spec);

// Nodes per class needed for roughly `edges` planted edges.
SyntheticSpec synthetic_for_edges(std::size_t edges, std::size_t types, std::size_t sublabels, std::uint64_t seed);

}  // namespace kgsum
