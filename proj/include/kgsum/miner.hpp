#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgsum/encoding.hpp"
#include "kgsum/model.hpp"
#include "kgsum/rule.hpp"

namespace kgsum {

inline constexpr std::size_t kNoPartner = static_cast<std::size_t>(-1);

struct Candidate {
  Rule rule;
  AssertionSet assertions;
  Bits rule_bits = 0;
  Bits assertion_bits = 0;
  // Error reduction against the empty model.
  Bits gain = 0;
  // Index (in the same candidate vector) of the opposite orientation.
  std::size_t reverse = kNoPartner;

  Bits bits() const { return rule_bits + assertion_bits; }
};

struct CandidateOptions {
  // Only the k most frequent labels may appear in generated rules.
  std::optional<std::size_t> label_cap;
};

// Atomic candidates with one root and one child label, both orientations of
// every labeled edge, deduplicated, matched and costed. Parallel over
// (root label, predicate, direction) groups.
std::vector<Candidate> generate_candidates(const KnowledgeGraph& g, const CandidateOptions& opts = {});

// Reference path: enumerates the same rules and evaluates each with the
// generic recursive matcher, one at a time. Same output as generate_candidates.
std::vector<Candidate> generate_candidates_serial(const KnowledgeGraph& g, const CandidateOptions& opts = {});

// Labels allowed by a cap: the k most frequent, ties by name.
std::vector<bool> allowed_labels(const KnowledgeGraph& g, std::optional<std::size_t> label_cap);

// Fills rule_bits, assertion_bits and gain from the assertions.
void cost_candidate(Candidate& c, const KnowledgeGraph& g);
ModelRule to_model_rule(const Candidate& c);

// Memoised |{v : labels ⊆ φ(v)}| for label sets.
class StartCounter {
 public:
  explicit StartCounter(const KnowledgeGraph& g) : g_(g) {}
  std::size_t count(std::span<const LabelId> sorted_labels);

 private:
  const KnowledgeGraph& g_;
  std::map<std::vector<LabelId>, std::size_t> cache_;
};

// Strengthens the root to the labels shared by every correct start when that
// does not raise L(G, M0 ∪ {g}). Returns true if the candidate changed.
bool qualify(Candidate& c, const KnowledgeGraph& g, StartCounter& counter);
bool qualify(Candidate& c, const KnowledgeGraph& g);

// Qualifies every candidate and merges those that became identical. Reverse
// links are remapped.
void qualify_all(std::vector<Candidate>& cands, const KnowledgeGraph& g);

// Sorts by gain desc, correct assertions desc, root label names asc, then the
// rule's canonical text. Reverse links are remapped.
void rank(std::vector<Candidate>& cands, const KnowledgeGraph& g);

// Greedy MDL selection over a ranked list in at most max_passes passes.
Model select(const KnowledgeGraph& g, std::span<const Candidate> ranked, int max_passes = 3);

// Merges rules with equal roots and equal correct start sets.
void refine_merge(Model& model);
// Nests a rule beneath an inner node of another whose labels equal its root.
void refine_nest(Model& model);

enum class RefineMode { None, Merge, Nest };
RefineMode refine_mode_from_string(const std::string& s);
const char* to_string(RefineMode m);

struct MinerOptions {
  RefineMode refine = RefineMode::None;
  int max_passes = 3;
  CandidateOptions candidates;
};

struct PhaseTimes {
  double generate = 0;
  double qualify = 0;
  double rank = 0;
  double select = 0;
  double merge = 0;
  double nest = 0;
};

struct MiningResult {
  Model model;
  std::size_t num_candidates = 0;
  PhaseTimes seconds;
};

// Generate, qualify, rank, select, then refine per options.
MiningResult summarize(const KnowledgeGraph& g, const MinerOptions& opts = {});

// Top-k baselines without MDL: by correct-assertion count (freq) or by
// covered-edge count (coverage). Ties keep the input order.
Model freq_select(const KnowledgeGraph& g, std::span<const Candidate> cands, std::size_t k);
Model coverage_select(const KnowledgeGraph& g, std::span<const Candidate> cands, std::size_t k);

}  // namespace kgsum
