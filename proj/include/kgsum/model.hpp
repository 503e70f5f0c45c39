#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kgsum/encoding.hpp"
#include "kgsum/graph.hpp"
#include "kgsum/rule.hpp"

namespace kgsum {

// A rule together with its assertions on the session graph and its two cost terms.
struct ModelRule {
  Rule rule;
  AssertionSet assertions;
  Bits rule_bits = 0;
  Bits assertion_bits = 0;
  std::uint64_t id = 0;  // unique within a Model; stable across edits

  Bits bits() const { return rule_bits + assertion_bits; }
};

// Matches and costs a rule on g.
ModelRule make_model_rule(Rule rule, const KnowledgeGraph& g);

enum class StepKind { Select, Merge, Nest };

// One accepted change to a model and the totals around it.
struct Step {
  StepKind kind;
  Bits before;
  Bits after;
  std::size_t rules_before;
  std::size_t rules_after;
};

// An ordered set of rules over a fixed graph with its coverage. The graph must
// outlive the model.
class Model {
 public:
  explicit Model(const KnowledgeGraph& g);

  const KnowledgeGraph& graph() const { return *g_; }
  const std::vector<ModelRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  const Coverage& coverage() const { return coverage_; }
  const std::vector<Step>& history() const { return history_; }

  Bits model_bits() const;
  Bits error_bits() const { return kgsum::error_bits(*g_, coverage_); }
  Bits total_bits() const { return model_bits() + error_bits(); }
  // L(G, M0) on the same graph.
  Bits empty_bits() const;

  // Change in total if `add` were inserted after removing the rules at
  // `remove` (indices). The model is left unchanged.
  Bits delta(std::span<const std::size_t> remove, const ModelRule* add) const;
  Bits delta_add(const ModelRule& add) const { return delta({}, &add); }

  void add(ModelRule r);
  // Removes the rules at `remove` and inserts `add` at the position of the
  // first removed rule.
  void replace(std::span<const std::size_t> remove, ModelRule add);
  void record(Step s) { history_.push_back(s); }

  std::vector<Rule> rule_list() const;

 private:
  const KnowledgeGraph* g_;
  std::vector<ModelRule> rules_;
  // Mutable so delta() can apply and revert coverage changes in place.
  mutable Coverage coverage_;
  std::vector<Step> history_;
  std::uint64_t next_id_ = 0;
};

}  // namespace kgsum
