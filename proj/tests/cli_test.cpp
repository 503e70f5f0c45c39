#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(KGSUM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kgsum_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Planted-pattern graph at dir/syn.*.
  void synth(int nodes = 600, int seed = 3) {
    auto r = run("synth --out " + path("syn") + " --nodes " + std::to_string(nodes) + " --seed " + std::to_string(seed));
    ASSERT_EQ(r.code, 0);
  }
  std::string syn_graph() const { return "--graph " + path("syn.triples.tsv") + " --labels " + path("syn.labels.tsv"); }

  fs::path dir_;
};

TEST_F(Cli, SummarizeCompressesPlantedGraph) {
  synth();
  auto r = run("summarize " + syn_graph() + " --out " + path("m.json") + " --refine nest");
  ASSERT_EQ(r.code, 0);
  auto rep = Json::parse(r.out);
  EXPECT_LT(rep["pct_bits_vs_empty"].get<double>(), 100.0);
  EXPECT_GT(rep["num_rules"].get<int>(), 0);
  EXPECT_EQ(rep["refine"], "nest");
  auto model = Json::parse(slurp(path("m.json")));
  EXPECT_EQ(model["rules"].size(), rep["num_rules"].get<std::size_t>());
}

TEST_F(Cli, SummarizeIsByteDeterministic) {
  synth();
  ASSERT_EQ(run("summarize " + syn_graph() + " --out " + path("a.json") + " --report " + path("ra.json") + " --refine nest").code, 0);
  ASSERT_EQ(run("summarize " + syn_graph() + " --out " + path("b.json") + " --report " + path("rb.json") + " --refine nest --threads 1").code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("ra.json")), slurp(path("rb.json")));
}

TEST_F(Cli, EmptyGraph) {
  spit(path("e.triples.tsv"), "");
  spit(path("e.labels.tsv"), "");
  auto r = run("summarize --graph " + path("e.triples.tsv") + " --labels " + path("e.labels.tsv") + " --out " + path("m.json"));
  ASSERT_EQ(r.code, 0);
  auto rep = Json::parse(r.out);
  EXPECT_EQ(rep["num_rules"], 0);
  EXPECT_DOUBLE_EQ(rep["pct_bits_vs_empty"].get<double>(), 100.0);
}

TEST_F(Cli, BaselineSelectors) {
  synth();
  auto r = run("summarize " + syn_graph() + " --out " + path("m.json") + " --selector freq --top-k 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["num_rules"], 3);
  EXPECT_EQ(run("summarize " + syn_graph() + " --out " + path("m.json") + " --selector coverage --top-k 0").code, 2);
}

TEST_F(Cli, CompleteReportsFrankensteinsMissingAuthor) {
  spit(path("b.triples.tsv"),
       "Dracula\twrittenBy\tStoker\nEmma\twrittenBy\tAusten\nUlysses\twrittenBy\tJoyce\nFrankenstein\tpublishedIn\t1818\n");
  spit(path("b.labels.tsv"),
       "Dracula\tBook\nEmma\tBook\nUlysses\tBook\nFrankenstein\tBook\nStoker\tAuthor\nAusten\tAuthor\nJoyce\tAuthor\n");
  spit(path("m.json"),
       R"({"rules":[{"rule":{"root_labels":["Book"],"children":[{"predicate":"writtenBy","direction":"out","child":{"root_labels":["Author"]}}]}}]})");
  const auto g = "--graph " + path("b.triples.tsv") + " --labels " + path("b.labels.tsv");
  auto r = run("complete " + g + " --model " + path("m.json"));
  ASSERT_EQ(r.code, 0);
  auto rep = Json::parse(r.out);
  ASSERT_EQ(rep["missing"].size(), 1u);
  const auto& m = rep["missing"][0];
  EXPECT_EQ(m["node"], "Frankenstein");
  EXPECT_EQ(m["predicate"], "writtenBy");
  EXPECT_EQ(m["direction"], "out");
  EXPECT_EQ(m["expected_labels"], Json::array({"Author"}));
  EXPECT_NEAR(m["score"].get<double>(), 2.0, 1e-12);

  spit(path("empty.json"), R"({"rules":[]})");
  r = run("complete " + g + " --model " + path("empty.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(Json::parse(r.out)["missing"].empty());
}

TEST_F(Cli, ScoreRanksEveryTestEdgeDescending) {
  synth();
  ASSERT_EQ(run("summarize " + syn_graph() + " --out " + path("m.json")).code, 0);
  spit(path("test.tsv"), "n0\tp0\tn5\nn1\tnope\tn2\nghost\tp1\tn3\n");
  auto r = run("score " + syn_graph() + " --model " + path("m.json") + " --test " + path("test.tsv"));
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<double> scores;
  while (std::getline(lines, line)) scores.push_back(std::stod(line.substr(line.rfind('\t') + 1)));
  ASSERT_EQ(scores.size(), 3u);
  EXPECT_TRUE(std::is_sorted(scores.rbegin(), scores.rend()));
}

TEST_F(Cli, AnomalyPipeline) {
  synth(1000);
  auto p = run("perturb " + syn_graph() + " --out " + path("pert") + " --q 0.01 --anomalies a3 --seed 4");
  ASSERT_EQ(p.code, 0);
  for (auto ext : {".triples.tsv", ".labels.tsv", ".truth.json", ".test.tsv"}) EXPECT_TRUE(fs::exists(path("pert") + ext));
  const auto g = "--graph " + path("pert.triples.tsv") + " --labels " + path("pert.labels.tsv");
  ASSERT_EQ(run("summarize " + g + " --out " + path("m.json") + " --refine merge").code, 0);
  ASSERT_EQ(run("score " + g + " --model " + path("m.json") + " --test " + path("pert.test.tsv") + " --out " + path("rank.tsv")).code, 0);
  auto e = run("evaluate --truth " + path("pert.truth.json") + " --ranking " + path("rank.tsv"));
  ASSERT_EQ(e.code, 0);
  auto rep = Json::parse(e.out);
  EXPECT_GT(rep["auc"].get<double>(), 0.8);
  EXPECT_TRUE(rep.contains("p_at_100"));
  EXPECT_TRUE(rep["by_type"].contains("a3"));
}

TEST_F(Cli, RemovalPipeline) {
  synth(1000);
  ASSERT_EQ(run("perturb " + syn_graph() + " --out " + path("rm") + " --mode pca --q 0.05 --seed 2").code, 0);
  const auto g = "--graph " + path("rm.triples.tsv") + " --labels " + path("rm.labels.tsv");
  ASSERT_EQ(run("summarize " + g + " --out " + path("m.json")).code, 0);
  auto e = run("evaluate --truth " + path("rm.truth.json") + " --model " + path("m.json") + " " + g);
  ASSERT_EQ(e.code, 0);
  auto rep = Json::parse(e.out);
  EXPECT_GE(rep["recall"].get<double>(), rep["recall_label"].get<double>());
  EXPECT_GT(rep["evaluated_nodes"].get<int>(), 0);
}

TEST_F(Cli, ExitCodes) {
  synth(200);
  EXPECT_EQ(run("summarize " + syn_graph() + " --out " + path("m.json") + " --refine both").code, 2);
  EXPECT_EQ(run("summarize --graph " + path("missing.tsv") + " --labels " + path("missing.tsv") + " --out " + path("m.json")).code, 1);
  EXPECT_EQ(run("summarize " + syn_graph() + " --out " + path("m.json") + " --max-passes 0").code, 2);
  EXPECT_EQ(run("perturb " + syn_graph() + " --out " + path("x") + " --q 0").code, 2);
  EXPECT_EQ(run("perturb " + syn_graph() + " --out " + path("x") + " --anomalies a9").code, 2);
  spit(path("bad.tsv"), "only\ttwo\n");
  EXPECT_EQ(run("summarize --graph " + path("bad.tsv") + " --labels " + path("syn.labels.tsv") + " --out " + path("m.json")).code, 1);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

}  // namespace
