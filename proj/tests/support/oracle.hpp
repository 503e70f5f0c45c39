#pragma once

// Straight-line reference for the description-length formulas, evaluated on
// a RawGraph by direct scans and exact big-integer binomials. Test-only.

#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

#include "kgsum/rule.hpp"
#include "raw_graph.hpp"

namespace kgsum::testing {

// log2 of an exact C(n, k) (Boost cpp_int).
double exact_log2_binomial(std::uint64_t n, std::uint64_t k);
double oracle_universal_int(std::uint64_t n);

struct OracleAssertion {
  bool correct = false;
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> edges;
  std::set<std::pair<std::uint32_t, std::uint32_t>> labels;  // (node, label)
  std::vector<std::uint32_t> counts;
};

struct OracleMatch {
  std::vector<std::uint32_t> starts;
  std::vector<std::uint32_t> correct;
  std::vector<OracleAssertion> per_start;  // aligned with starts
};

// The recursive definition applied literally, re-scanning the triple list at
// every step. A (graph node, rule node) pair is expanded once per assertion.
OracleMatch oracle_match(const Rule& rule, const RawGraph& raw);

double oracle_rule_bits(const Rule& rule, const RawGraph& raw);

struct OracleCost {
  double model = 0;
  double error = 0;
  double total() const { return model + error; }
};
OracleCost oracle_total_cost(const RawGraph& raw, const std::vector<Rule>& rules);

}  // namespace kgsum::testing
