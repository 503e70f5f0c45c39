#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kgsum/graph.hpp"
#include "kgsum/model.hpp"
#include "kgsum/model_io.hpp"

namespace kgsum {

// A1 drops a label, A2 adds a foreign label, A3 injects random edges, A4
// swaps a label for a foreign one.
enum class AnomalyType { A1, A2, A3, A4 };
const char* to_string(AnomalyType t);
AnomalyType anomaly_from_string(std::string_view s);  // "a1".."a4", any case
std::vector<AnomalyType> parse_anomaly_list(std::string_view csv);

struct PerturbationSpec {
  double q = 0.01;  // fraction of nodes sampled per type
  std::vector<AnomalyType> types;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
};

struct PerturbedEdge {
  NamedTriple edge;
  AnomalyType type;
};

// Everything the evaluation needs, by external names so it survives the
// renumbering of the perturbed graph.
struct EdgeTruth {
  std::vector<PerturbedEdge> perturbed;  // an edge may appear under several types
  std::vector<NamedTriple> clean;
  std::vector<NamedTriple> validation;
  std::vector<NamedTriple> test;  // shuffled mixture of perturbed and clean
};

struct PerturbationResult {
  KnowledgeGraph graph;
  EdgeTruth truth;
};

// Applies the requested types in the order A1, A2, A3, A4. Each type samples
// ceil(q |V|) distinct nodes of the input graph on its own, so the types may
// overlap. A1/A2/A4 mark every edge incident to an altered node in the
// final graph; A3 marks only its injected edges.
PerturbationResult perturb(const KnowledgeGraph& g, const PerturbationSpec& spec);

// One assertion destroyed by removing a node, seen from the surviving
// neighbour: the neighbour had a `predicate` edge in `direction` to the
// removed node.
struct DestroyedAssertion {
  std::string neighbor;
  std::string predicate;
  Direction direction;
};

struct RemovedNode {
  std::string node;
  std::vector<std::string> labels;  // sorted
  std::vector<DestroyedAssertion> assertions;
};

struct RemovalTruth {
  std::vector<RemovedNode> removed;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

struct RemovalResult {
  KnowledgeGraph graph;
  RemovalTruth truth;
};

// Removes ceil(q |V|) nodes and their edges, then for every (neighbour,
// predicate, direction) that lost an edge drops the neighbour's remaining
// edges of that kind as well.
RemovalResult remove_nodes_pca(const KnowledgeGraph& g, double q, std::uint64_t seed, double validation_fraction = 0.2);

// Seeded shuffle, then the first ceil(fraction * n) items go to validation.
template <class T>
std::pair<std::vector<T>, std::vector<T>> split_validation_test(std::vector<T> items, double fraction,
                                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(items.begin(), items.end(), rng);
  auto n_val = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(items.size())));
  n_val = std::min(n_val, items.size());
  std::vector<T> val(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<T> test(items.begin() + static_cast<std::ptrdiff_t>(n_val), items.end());
  return {std::move(val), std::move(test)};
}

// --- metrics ---------------------------------------------------------------

struct ScoredTriple {
  NamedTriple edge;
  double score;
};

void write_ranking(std::span<const ScoredTriple> ranking, std::ostream& out);
std::vector<ScoredTriple> read_ranking(std::istream& in);
std::vector<ScoredTriple> read_ranking_file(const std::string& path);

struct MetricsReport {
  double auc = 0;
  double precision_at_k = 0;
  double recall_at_k = 0;
  double f1_at_k = 0;
  std::size_t k = 0;           // requested cutoff
  std::size_t cutoff = 0;      // after extending through ties
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// Ranking must be in descending score order. With a type filter, edges
// perturbed only by other types are dropped first. AUC uses 1/rank (ties
// share the best rank) as the predicted score and counts ties as 1/2.
MetricsReport compute_metrics(std::span<const ScoredTriple> ranking, const EdgeTruth& truth,
                              std::optional<AnomalyType> only = std::nullopt, std::size_t k = 100);

// Area under the ROC curve from raw scores and labels, ties counted as 1/2.
double auc_score(std::span<const double> scores, std::span<const char> positive);

struct CompletenessReport {
  double recall = 0;        // removed nodes whose absence some rule reveals
  double recall_label = 0;  // ... with the expected child labels held by the node
  std::size_t evaluated = 0;
};

// Scores the removed nodes of the test split against a model mined on the
// post-removal graph.
CompletenessReport completeness(const Model& model, const RemovalTruth& truth);

// Where the model expects information it cannot find: for every rule
// exception, each root-level child with no matching neighbour.
struct MissingInfo {
  NodeId node;
  std::size_t rule;  // index in the model
  PredId predicate;
  Direction direction;
  std::vector<LabelId> expected_labels;
  Bits node_score;
};
std::vector<MissingInfo> missing_information(const Model& model);

// --- truth files -----------------------------------------------------------

Json edge_truth_to_json(const EdgeTruth& t);
EdgeTruth edge_truth_from_json(const Json& j);
Json removal_truth_to_json(const RemovalTruth& t);
RemovalTruth removal_truth_from_json(const Json& j);

}  // namespace kgsum
