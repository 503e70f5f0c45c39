#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kgsum/error.hpp"
#include "kgsum/miner.hpp"
#include "kgsum/model_io.hpp"

namespace kgsum {
namespace {

KnowledgeGraph load(const std::string& triples, const std::string& labels) {
  std::istringstream t(triples), l(labels);
  return load_graph(t, l);
}

KnowledgeGraph library() {
  std::string t, l;
  for (int i = 0; i < 6; ++i) {
    auto b = "b" + std::to_string(i), a = "a" + std::to_string(i), c = "c" + std::to_string(i % 3);
    t += b + "\twrittenBy\t" + a + "\n" + a + "\tbornIn\t" + c + "\n";
    l += b + "\tBook\n" + a + "\tAuthor\n" + a + "\tPerson\n" + c + "\tCountry\n";
  }
  return load(t, l);
}

// A nested rule and one with a two-label root.
Model hand_model(const KnowledgeGraph& g) {
  auto L = [&](const char* n) { return *g.label_names().find(n); };
  auto P = [&](const char* n) { return *g.predicate_names().find(n); };
  Model m(g);
  Rule nested = atomic_rule(L("Book"), P("writtenBy"), Direction::Out, L("Author"));
  nested.children[0].rule.children.push_back(Child{P("bornIn"), Direction::Out, Rule{{L("Country")}, {}}});
  m.add(make_model_rule(nested, g));
  m.add(make_model_rule(Rule{{L("Author"), L("Person")}, {Child{P("writtenBy"), Direction::In, Rule{{L("Book")}, {}}}}}, g));
  return m;
}

TEST(ModelIo, RoundTripPreservesRulesAndCost) {
  auto g = library();
  auto m = hand_model(g);
  ASSERT_FALSE(m.empty());
  std::stringstream ss;
  write_model(m, ss);
  auto back = read_model(ss, g);
  EXPECT_EQ(back.rule_list(), m.rule_list());
  EXPECT_NEAR(back.total_bits(), m.total_bits(), 1e-9);
  EXPECT_EQ(model_to_json(back).dump(), model_to_json(m).dump());
}

TEST(ModelIo, RuleJsonShape) {
  auto g = library();
  auto r = atomic_rule(*g.label_names().find("Book"), *g.predicate_names().find("writtenBy"), Direction::Out,
                       *g.label_names().find("Author"));
  auto j = rule_to_json(r, g);
  EXPECT_EQ(j.dump(),
            R"({"root_labels":["Book"],"children":[{"predicate":"writtenBy","direction":"out","child":{"root_labels":["Author"],"children":[]}}]})");
  EXPECT_EQ(rule_from_json(j, g), r);
}

TEST(ModelIo, ReloadOnAnotherGraphRematches) {
  auto g = library();
  auto m = hand_model(g);
  std::stringstream ss;
  write_model(m, ss);
  // Same schema, fewer books.
  auto small = load("b0\twrittenBy\ta0\na0\tbornIn\tc0\n", "b0\tBook\na0\tAuthor\na0\tPerson\nc0\tCountry\n");
  auto back = read_model(ss, small);
  EXPECT_EQ(back.size(), m.size());
  for (const auto& r : back.rules()) EXPECT_EQ(r.assertions.num_correct(), 1u);
}

TEST(ModelIo, UnknownRootLabelIsDomainError) {
  auto g = library();
  std::istringstream in(R"({"rules":[{"rule":{"root_labels":["Planet"],"children":[]}}]})");
  EXPECT_THROW(read_model(in, g), DomainError);
}

TEST(ModelIo, UnknownChildNamesMatchNothing) {
  auto g = library();
  auto j = Json::parse(
      R"({"root_labels":["Book"],"children":[{"predicate":"orbits","direction":"out","child":{"root_labels":["Author"]}}]})");
  auto r = rule_from_json(j, g);
  auto a = match(r, g);
  EXPECT_EQ(a.num_assertions, 6u);
  EXPECT_EQ(a.num_correct(), 0u);
  EXPECT_THROW(rule_to_json(r, g), DomainError);
}

TEST(ModelIo, MalformedDocuments) {
  auto g = library();
  auto bad = [&](const char* text) {
    std::istringstream in(text);
    return read_model(in, g);
  };
  EXPECT_THROW(bad("{not json"), StructuralError);
  EXPECT_THROW(bad(R"({"rules": 3})"), StructuralError);
  EXPECT_THROW(bad(R"({"rules":[{"norule":1}]})"), StructuralError);
  EXPECT_THROW(bad(R"({"rules":[{"rule":{"root_labels":[]}}]})"), StructuralError);
  EXPECT_THROW(bad(R"({"rules":[{"rule":{"root_labels":["Book"],"children":[{"predicate":"writtenBy","direction":"up","child":{"root_labels":["Author"]}}]}}]})"),
               StructuralError);
  EXPECT_THROW(read_model_file("/nonexistent/model.json", g), Error);
}

TEST(ModelIo, DepthLimit) {
  auto g = library();
  Json leaf = Json::parse(R"({"root_labels":["Author"]})");
  Json j = leaf;
  for (std::size_t i = 0; i <= kMaxRuleDepth; ++i) {
    Json parent;
    parent["root_labels"] = Json::array({"Book"});
    parent["children"] = Json::array({Json{{"predicate", "writtenBy"}, {"direction", "out"}, {"child", j}}});
    j = parent;
  }
  EXPECT_THROW(rule_from_json(j, g), StructuralError);
}

TEST(ModelSummary, Percentages) {
  auto g = library();
  Model empty(g);
  auto s = summarize_model(empty);
  EXPECT_NEAR(s.pct_bits_vs_empty, 100.0, 1e-12);
  EXPECT_EQ(s.pct_edges_explained, 0.0);
  auto m = hand_model(g);
  s = summarize_model(m);
  EXPECT_NEAR(s.total_bits, m.total_bits(), 1e-9);
  EXPECT_NEAR(s.pct_bits_vs_empty, 100.0 * m.total_bits() / m.empty_bits(), 1e-9);
  EXPECT_NEAR(s.pct_edges_explained,
              100.0 * static_cast<double>(m.coverage().modeled_edges()) / static_cast<double>(g.num_distinct_edges()), 1e-9);
}

}  // namespace
}  // namespace kgsum
