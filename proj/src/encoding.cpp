#include "kgsum/encoding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "kgsum/error.hpp"

namespace kgsum {

namespace {

constexpr long double kLn2 = 0.693147180559945309417232121458176568L;
constexpr double kUniversalConstant = 2.865064;

// Tail of Stirling's series for ln Gamma(z), z >= ~100.
long double stirling_tail(long double z) {
  const long double z2 = z * z;
  return 1.0L / (12.0L * z) - 1.0L / (360.0L * z * z2) + 1.0L / (1260.0L * z * z2 * z2) -
         1.0L / (1680.0L * z * z2 * z2 * z2);
}

Bits exact_log2_binomial(std::uint64_t n, std::uint64_t k) {
  k = std::min(k, n - k);
  long double sum = 0.0L;
  for (std::uint64_t i = 1; i <= k; ++i)
    sum += std::log2(static_cast<long double>(n - k + i) / static_cast<long double>(i));
  return static_cast<Bits>(sum);
}

// ln C(n, k) for k <= n/2 and n large: ln Gamma(n+1) - ln Gamma(n-k+1) is
// formed from Stirling differences to avoid cancelling two huge numbers.
long double large_ln_binomial(long double n, long double k) {
  const long double a = n - k;
  long double head = (a + 0.5L) * std::log1p(k / (a + 1.0L)) + k * std::log(n + 1.0L) - k;
  head += stirling_tail(n + 1.0L) - stirling_tail(a + 1.0L);
  return head - std::lgamma(k + 1.0L);
}

}  // namespace

Bits universal_int_bits(std::uint64_t n) {
  if (n < 1) throw DomainError("universal integer code is defined for n >= 1");
  double bits = std::log2(kUniversalConstant);
  double x = std::log2(static_cast<double>(n));
  while (x > 0.0) {
    bits += x;
    x = std::log2(x);
  }
  return bits;
}

Bits log2_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw DomainError("log2_binomial: k > n");
  if (k == 0 || k == n) return 0.0;
  if (n <= 1000) return exact_log2_binomial(n, k);
  return log2_binomial(static_cast<long double>(n), static_cast<long double>(k));
}

Bits log2_binomial(long double n, long double k) {
  if (k < 0.0L || n < 0.0L || k > n) throw DomainError("log2_binomial: need 0 <= k <= n");
  k = std::min(k, n - k);
  if (k == 0.0L) return 0.0;
  if (n <= 1000.0L)
    return exact_log2_binomial(static_cast<std::uint64_t>(std::llround(n)), static_cast<std::uint64_t>(std::llround(k)));
  return static_cast<Bits>(large_ln_binomial(n, k) / kLn2);
}

Bits label_set_bits(std::span<const LabelId> labels, const KnowledgeGraph& g) {
  if (g.num_labels() == 0 || g.num_nodes() == 0) throw DomainError("label code on a graph without labels");
  Bits bits = std::log2(static_cast<double>(g.num_labels()));
  const double nodes = static_cast<double>(g.num_nodes());
  for (auto l : labels) {
    if (l >= g.num_labels() || g.label_count(l) == 0) throw DomainError("label with zero frequency has no code");
    bits -= std::log2(static_cast<double>(g.label_count(l)) / nodes);
  }
  return bits;
}

Bits rule_bits(const Rule& rule, const KnowledgeGraph& g) {
  Bits bits = label_set_bits(rule.root_labels, g) + universal_int_bits(rule.children.size() + 1);
  const double edges = static_cast<double>(g.num_edges());
  for (const auto& c : rule.children) {
    if (c.predicate >= g.num_predicates() || g.predicate_count(c.predicate) == 0)
      throw DomainError("predicate with zero frequency has no code");
    bits += -std::log2(static_cast<double>(g.predicate_count(c.predicate)) / edges) + 1.0 + rule_bits(c.rule, g);
  }
  return bits;
}

Bits exception_bits(std::size_t num_assertions, std::size_t num_exceptions) {
  if (num_assertions == 0) throw DomainError("a rule without assertions cannot be encoded");
  return std::log2(static_cast<double>(num_assertions)) + log2_binomial(std::uint64_t{num_assertions}, std::uint64_t{num_exceptions});
}

Bits traversal_bits(const std::vector<std::uint32_t>& neighbor_counts, std::size_t num_nodes) {
  if (neighbor_counts.empty()) return 0.0;
  const double per_count = std::log2(static_cast<double>(num_nodes));
  // Most counts are small; cache them.
  std::array<double, 64> cache;
  cache.fill(-1.0);
  Bits bits = 0.0;
  // A self-loop can make m reach |V|; the id bound then grows to m.
  auto id_bits = [&](std::uint32_t m) {
    return log2_binomial(std::max<std::uint64_t>(num_nodes - 1, m), std::uint64_t{m});
  };
  for (auto m : neighbor_counts) {
    double ids;
    if (m < cache.size()) {
      if (cache[m] < 0.0) cache[m] = id_bits(m);
      ids = cache[m];
    } else {
      ids = id_bits(m);
    }
    bits += per_count + ids;
  }
  return bits;
}

Bits assertion_bits(const AssertionSet& aset, const KnowledgeGraph& g) {
  return exception_bits(aset.num_assertions, aset.num_exceptions()) + traversal_bits(aset.neighbor_counts, g.num_nodes());
}

Bits rule_count_bits(const KnowledgeGraph& g) {
  const long double lv = static_cast<long double>(g.num_labels());
  const long double le = static_cast<long double>(g.num_predicates());
  return static_cast<Bits>(std::log2(2.0L * lv * lv * le + 1.0L));
}

// --- Coverage ------------------------------------------------------------

Coverage::Coverage(const KnowledgeGraph& g)
    : edge_refs_(g.num_distinct_edges(), 0), label_refs_(g.num_label_assignments(), 0) {}

void Coverage::add(const AssertionSet& aset) {
  for (auto e : aset.covered_edges)
    if (edge_refs_[e]++ == 0) ++modeled_edges_;
  for (auto s : aset.covered_labels)
    if (label_refs_[s]++ == 0) ++modeled_labels_;
}

void Coverage::remove(const AssertionSet& aset) {
  for (auto e : aset.covered_edges)
    if (--edge_refs_[e] == 0) --modeled_edges_;
  for (auto s : aset.covered_labels)
    if (--label_refs_[s] == 0) --modeled_labels_;
}

Coverage::Gain Coverage::preview(const AssertionSet& aset) const {
  Gain gain;
  for (auto e : aset.covered_edges) gain.edges += edge_refs_[e] == 0;
  for (auto s : aset.covered_labels) gain.labels += label_refs_[s] == 0;
  return gain;
}

std::vector<EdgeId> Coverage::modeled_edge_ids() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < edge_refs_.size(); ++e)
    if (edge_refs_[e]) out.push_back(e);
  return out;
}

std::vector<LabelSlot> Coverage::modeled_label_slots() const {
  std::vector<LabelSlot> out;
  for (LabelSlot s = 0; s < label_refs_.size(); ++s)
    if (label_refs_[s]) out.push_back(s);
  return out;
}

// --- error ---------------------------------------------------------------

long double label_universe(const KnowledgeGraph& g) {
  return static_cast<long double>(g.num_labels()) * static_cast<long double>(g.num_nodes());
}

long double edge_universe(const KnowledgeGraph& g) {
  const long double v = static_cast<long double>(g.num_nodes());
  return v * v * static_cast<long double>(g.num_predicates());
}

Bits edge_error_bits(const KnowledgeGraph& g, std::size_t modeled_edges) {
  const long double unmodeled = static_cast<long double>(g.num_distinct_edges() - modeled_edges);
  return log2_binomial(edge_universe(g) - static_cast<long double>(modeled_edges), unmodeled);
}

Bits error_bits(const KnowledgeGraph& g, std::size_t modeled_edges, std::size_t modeled_labels) {
  const long double unmodeled_labels = static_cast<long double>(g.num_label_assignments() - modeled_labels);
  return log2_binomial(label_universe(g) - static_cast<long double>(modeled_labels), unmodeled_labels) +
         edge_error_bits(g, modeled_edges);
}

Bits error_bits(const KnowledgeGraph& g, const Coverage& cov) {
  return error_bits(g, cov.modeled_edges(), cov.modeled_labels());
}

CostBreakdown total_cost(const KnowledgeGraph& g, const std::vector<Rule>& rules) {
  CostBreakdown c;
  c.model = rule_count_bits(g);
  Coverage cov(g);
  for (const auto& r : rules) {
    auto aset = match(r, g);
    c.model += rule_bits(r, g) + assertion_bits(aset, g);
    cov.add(aset);
  }
  c.error = error_bits(g, cov);
  return c;
}

}  // namespace kgsum
