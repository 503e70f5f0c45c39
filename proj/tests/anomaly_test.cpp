#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kgsum/anomaly.hpp"
#include "kgsum/error.hpp"
#include "kgsum/miner.hpp"
#include "support/raw_graph.hpp"

namespace kgsum {
namespace {

KnowledgeGraph load(const std::string& triples, const std::string& labels) {
  std::istringstream t(triples), l(labels);
  return load_graph(t, l);
}

NodeId N(const KnowledgeGraph& g, const std::string& n) { return *g.node_names().find(n); }
LabelId L(const KnowledgeGraph& g, const char* n) { return *g.label_names().find(n); }
PredId P(const KnowledgeGraph& g, const char* n) { return *g.predicate_names().find(n); }

// x0..x7 carry X; all but x7 have a p-edge to a Y node. z is outside every rule.
KnowledgeGraph one_exception_graph() {
  std::string t, l;
  for (int i = 0; i < 8; ++i) l += "x" + std::to_string(i) + "\tX\n";
  for (int i = 0; i < 7; ++i) {
    t += "x" + std::to_string(i) + "\tp\ty" + std::to_string(i) + "\n";
    l += "y" + std::to_string(i) + "\tY\n";
  }
  t += "z\tq\ty0\n";
  return load(t, l);
}

Model one_rule_model(const KnowledgeGraph& g) {
  Model m(g);
  m.add(make_model_rule(atomic_rule(L(g, "X"), P(g, "p"), Direction::Out, L(g, "Y")), g));
  return m;
}

TEST(NodeScore, SoleExceptionOfEight) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  EXPECT_NEAR(node_score(m, N(g, "x7")), 3.0, 1e-12);
  EXPECT_EQ(node_score(m, N(g, "x0")), 0.0);
  EXPECT_EQ(node_score(m, N(g, "z")), 0.0);
  EXPECT_EQ(node_score(m, N(g, "y3")), 0.0);
  EXPECT_THROW(node_score(m, static_cast<NodeId>(g.num_nodes())), DomainError);
}

TEST(NodeScore, EmptyModelScoresZero) {
  auto g = one_exception_graph();
  Model m(g);
  for (auto s : node_scores(m)) EXPECT_EQ(s, 0.0);
}

Model random_model(std::mt19937_64& rng, const KnowledgeGraph& g) {
  // Unfiltered candidates give many exceptions per rule; keep those with a correct start.
  auto cs = generate_candidates(g);
  std::erase_if(cs, [](const Candidate& c) { return c.assertions.num_correct() == 0; });
  std::shuffle(cs.begin(), cs.end(), rng);
  if (cs.size() > 6) cs.resize(6);
  return coverage_select(g, cs, 1000);
}

TEST(NodeScore, SharesSumToExceptionBinomials) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 80; ++trial) {
    auto g = testing::to_graph(testing::random_raw_graph(rng, {12, 4, 3, 30}));
    auto m = random_model(rng, g);
    auto scores = node_scores(m);
    double want = 0;
    std::vector<char> is_exception(g.num_nodes(), 0);
    for (const auto& r : m.rules()) {
      want += log2_binomial(std::uint64_t{r.assertions.num_assertions}, std::uint64_t{r.assertions.num_exceptions()});
      for (auto v : r.assertions.exception_starts(r.rule, g)) is_exception[v] = 1;
    }
    double sum = 0;
    for (std::size_t v = 0; v < scores.size(); ++v) {
      sum += scores[v];
      EXPECT_GE(scores[v], 0.0);
      EXPECT_EQ(scores[v] > 0.0, is_exception[v] != 0) << v;
    }
    EXPECT_NEAR(sum, want, 1e-9 * std::max(1.0, want));
  }
}

TEST(NodeScore, ParallelMatchesSerial) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::to_graph(testing::random_raw_graph(rng, {12, 4, 3, 30}));
    auto m = random_model(rng, g);
    auto par = node_scores(m);
    auto ser = node_scores_serial(m);
    ASSERT_EQ(par.size(), ser.size());
    for (std::size_t v = 0; v < par.size(); ++v) EXPECT_NEAR(par[v], ser[v], 1e-12);
  }
}

TEST(EdgeScore, ModeledEdgeBetweenCleanEndpointsIsZero) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  EdgeScorer s(m);
  Triple t{N(g, "x0"), P(g, "p"), N(g, "y0")};
  EXPECT_TRUE(s.modeled(t));
  EXPECT_EQ(s.score(t), 0.0);
}

TEST(EdgeScore, UnmodeledEdgeGetsUniformShare) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  EdgeScorer s(m);
  Triple t{N(g, "z"), P(g, "q"), N(g, "y0")};
  EXPECT_FALSE(s.modeled(t));
  const auto unmodeled = m.coverage().unmodeled_edges();
  ASSERT_EQ(unmodeled, 1u);
  EXPECT_NEAR(s.score(t), edge_error_bits(g, m.coverage().modeled_edges()) / unmodeled, 1e-12);
  EXPECT_NEAR(s.unmodeled_share() * static_cast<double>(unmodeled), edge_error_bits(g, m.coverage().modeled_edges()),
              1e-9);
}

TEST(EdgeScore, UnmodeledEdgesDifferOnlyThroughEndpoints) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  EdgeScorer s(m);
  // Both edges are outside the graph; one touches the exception x7.
  Triple a{N(g, "z"), P(g, "q"), N(g, "y1")};
  Triple b{N(g, "x7"), P(g, "q"), N(g, "y1")};
  EXPECT_NEAR(s.score(b) - s.score(a), s.node(N(g, "x7")) - s.node(N(g, "z")), 1e-12);
  EXPECT_NEAR(s.score(b) - s.score(a), 3.0, 1e-12);
}

TEST(EdgeScore, InjectedEdgeOutranksModeledOne) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  EdgeScorer s(m);
  Triple modeled{N(g, "x1"), P(g, "p"), N(g, "y1")};
  Triple injected{N(g, "x1"), P(g, "q"), N(g, "y1")};
  EXPECT_GT(s.score(injected), s.score(modeled));
}

TEST(EdgeScore, FullyModeledGraphChargesOutsideEdgesAlone) {
  auto g = load("a\tp\tb\nc\tp\td\n", "a\tX\nc\tX\nb\tY\nd\tY\n");
  Model m(g);
  m.add(make_model_rule(atomic_rule(L(g, "X"), P(g, "p"), Direction::Out, L(g, "Y")), g));
  ASSERT_EQ(m.coverage().unmodeled_edges(), 0u);
  EXPECT_NEAR(unmodeled_edge_share(m), std::log2(16.0 - 2.0), 1e-12);
}

TEST(EdgeScore, UnknownEndpointsScoreZero) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  EdgeScorer s(m);
  Triple t{kUnknownId, P(g, "p"), kUnknownId};
  EXPECT_FALSE(s.modeled(t));
  EXPECT_NEAR(s.score(t), s.unmodeled_share(), 1e-12);
}

TEST(ScoreEdges, ParallelMatchesSerial) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = testing::to_graph(testing::random_raw_graph(rng, {12, 4, 3, 30}));
    auto m = random_model(rng, g);
    EdgeScorer s(m);
    std::vector<Triple> edges(g.distinct_edges().begin(), g.distinct_edges().end());
    edges.push_back(Triple{0, 0, 0});
    EXPECT_EQ(score_edges(s, edges), score_edges_serial(s, edges));
  }
}

TEST(RankEdges, StableDescending) {
  std::vector<Bits> zeros(5, 0.0);
  auto r = rank_edges(zeros);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i].index, i);

  std::vector<Bits> s{1.0, 3.0, 1.0, 2.0, 3.0};
  r = rank_edges(s);
  std::vector<std::size_t> order;
  for (const auto& e : r) order.push_back(e.index);
  EXPECT_EQ(order, (std::vector<std::size_t>{1, 4, 3, 0, 2}));
}

TEST(RankEdges, FromModel) {
  auto g = one_exception_graph();
  auto m = one_rule_model(g);
  std::vector<Triple> edges{{N(g, "x0"), P(g, "p"), N(g, "y0")}, {N(g, "x7"), P(g, "q"), N(g, "y1")},
                            {N(g, "z"), P(g, "q"), N(g, "y0")}};
  auto r = rank_edges(edges, m);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].index, 1u);
  EXPECT_EQ(r[1].index, 2u);
  EXPECT_EQ(r[2].index, 0u);
}

}  // namespace
}  // namespace kgsum
