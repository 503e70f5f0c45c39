#include "kgsum/model.hpp"

#include <algorithm>

#include "kgsum/error.hpp"

namespace kgsum {

ModelRule make_model_rule(Rule rule, const KnowledgeGraph& g) {
  ModelRule m;
  m.rule = canonicalize(std::move(rule));
  m.assertions = match(m.rule, g);
  m.rule_bits = rule_bits(m.rule, g);
  m.assertion_bits = assertion_bits(m.assertions, g);
  return m;
}

Model::Model(const KnowledgeGraph& g) : g_(&g), coverage_(g) {}

Bits Model::model_bits() const {
  Bits bits = rule_count_bits(*g_);
  for (const auto& r : rules_) bits += r.bits();
  return bits;
}

Bits Model::empty_bits() const { return rule_count_bits(*g_) + kgsum::error_bits(*g_, 0, 0); }

Bits Model::delta(std::span<const std::size_t> remove, const ModelRule* add) const {
  const Bits error_before = error_bits();
  Bits delta = 0;
  for (auto i : remove) {
    delta -= rules_[i].bits();
    coverage_.remove(rules_[i].assertions);
  }
  if (add) {
    delta += add->bits();
    coverage_.add(add->assertions);
  }
  const Bits error_after = error_bits();
  if (add) coverage_.remove(add->assertions);
  for (auto i : remove) coverage_.add(rules_[i].assertions);
  return delta + (error_after - error_before);
}

void Model::add(ModelRule r) {
  if (r.assertions.num_assertions == 0) throw DomainError("cannot add a rule without assertions");
  r.id = next_id_++;
  coverage_.add(r.assertions);
  rules_.push_back(std::move(r));
}

void Model::replace(std::span<const std::size_t> remove, ModelRule add) {
  if (remove.empty()) {
    this->add(std::move(add));
    return;
  }
  add.id = next_id_++;
  std::vector<std::size_t> sorted(remove.begin(), remove.end());
  std::sort(sorted.begin(), sorted.end());
  for (auto i : sorted) coverage_.remove(rules_[i].assertions);
  coverage_.add(add.assertions);
  const auto slot = sorted.front();
  rules_[slot] = std::move(add);
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
    if (*it != slot) rules_.erase(rules_.begin() + static_cast<std::ptrdiff_t>(*it));
}

std::vector<Rule> Model::rule_list() const {
  std::vector<Rule> out;
  out.reserve(rules_.size());
  for (const auto& r : rules_) out.push_back(r.rule);
  return out;
}

}  // namespace kgsum
