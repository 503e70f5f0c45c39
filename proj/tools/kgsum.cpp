// kgsum: command-line front end for summarizing knowledge graphs and for the
// anomaly and completeness experiments built on the summaries.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kgsum/anomaly.hpp"
#include "kgsum/error.hpp"
#include "kgsum/eval.hpp"
#include "kgsum/miner.hpp"
#include "kgsum/model_io.hpp"
#include "kgsum/parallel.hpp"
#include "kgsum/synthetic.hpp"

namespace {

using namespace kgsum;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

// Writes to `path`, or stdout when it is empty.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_out(path);
  write(out);
  if (!out) throw Error("failed writing '" + path + "'");
}

void emit_json(const std::string& path, const Json& j) {
  emit(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

Json graph_json(const KnowledgeGraph& g) {
  Json j;
  j["nodes"] = g.num_nodes();
  j["edges"] = g.num_edges();
  j["distinct_edges"] = g.num_distinct_edges();
  j["labels"] = g.num_labels();
  j["predicates"] = g.num_predicates();
  j["label_assignments"] = g.num_label_assignments();
  return j;
}

struct GraphArgs {
  std::string graph;
  std::string labels;

  void add(CLI::App* cmd) {
    cmd->add_option("--graph", graph, "Triples file (s<TAB>p<TAB>o)")->required();
    cmd->add_option("--labels", labels, "Labels file (node<TAB>label)")->required();
  }
  KnowledgeGraph load() const { return load_graph_files(graph, labels); }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// --- summarize -------------------------------------------------------------

struct SummarizeArgs {
  GraphArgs in;
  std::string out;
  std::string report;
  std::string refine = "none";
  std::string selector = "mdl";
  int max_passes = 3;
  std::size_t top_k = 100;
  std::optional<std::size_t> label_cap;
};

void run_summarize(const SummarizeArgs& a) {
  Timer total;
  const auto g = a.in.load();
  std::fprintf(stderr, "loaded %zu nodes, %zu edges, %zu labels, %zu predicates in %.3fs\n", g.num_nodes(),
               g.num_edges(), g.num_labels(), g.num_predicates(), total.seconds());

  MinerOptions opts;
  opts.refine = refine_mode_from_string(a.refine);
  opts.max_passes = a.max_passes;
  opts.candidates.label_cap = a.label_cap;

  std::optional<MiningResult> result;
  std::optional<Model> baseline;
  std::size_t num_candidates = 0;
  if (a.selector == "mdl") {
    result = summarize(g, opts);
    num_candidates = result->num_candidates;
    const auto& t = result->seconds;
    std::fprintf(stderr, "phases: generate %.3fs, qualify %.3fs, rank %.3fs, select %.3fs, merge %.3fs, nest %.3fs\n",
                 t.generate, t.qualify, t.rank, t.select, t.merge, t.nest);
  } else if (a.selector == "freq" || a.selector == "coverage") {
    auto cands = generate_candidates(g, opts.candidates);
    qualify_all(cands, g);
    rank(cands, g);
    num_candidates = cands.size();
    baseline = a.selector == "freq" ? freq_select(g, cands, a.top_k) : coverage_select(g, cands, a.top_k);
  } else {
    throw ConfigError("unknown selector '" + a.selector + "' (expected mdl|freq|coverage)");
  }
  const Model& model = result ? result->model : *baseline;

  emit(a.out, [&](std::ostream& out) { write_model(model, out); });

  const auto s = summarize_model(model);
  const auto& cov = model.coverage();
  Json r;
  r["graph"] = graph_json(g);
  r["selector"] = a.selector;
  r["refine"] = a.selector == "mdl" ? a.refine : "none";
  r["num_candidates"] = num_candidates;
  r["num_rules"] = model.size();
  r["L_model_bits"] = s.model_bits;
  r["L_error_bits"] = s.error_bits;
  r["L_total_bits"] = s.total_bits;
  r["L_empty_bits"] = s.empty_bits;
  r["pct_bits_vs_empty"] = s.pct_bits_vs_empty;
  r["pct_edges_explained"] = s.pct_edges_explained;
  r["modeled_edges"] = cov.modeled_edges();
  r["total_edges"] = cov.total_edges();
  r["modeled_labels"] = cov.modeled_labels();
  r["total_labels"] = cov.total_labels();
  emit_json(a.report, r);

  std::fprintf(stderr, "%zu rules, %.2f%% bits of the empty model, %.2f%% edges explained, %.3fs total\n",
               model.size(), s.pct_bits_vs_empty, s.pct_edges_explained, total.seconds());
}

// --- score -----------------------------------------------------------------

struct ScoreArgs {
  GraphArgs in;
  std::string model;
  std::string test;
  std::string out;
};

void run_score(const ScoreArgs& a) {
  const auto g = a.in.load();
  const auto model = read_model_file(a.model, g);
  const auto test = read_triples_file(a.test);
  std::vector<Triple> ids;
  ids.reserve(test.size());
  for (const auto& t : test) ids.push_back(resolve(t, g));
  EdgeScorer scorer(model);
  const auto scores = score_edges(scorer, ids);
  std::vector<ScoredTriple> ranking;
  for (const auto& r : rank_edges(scores)) ranking.push_back({test[r.index], r.score});
  emit(a.out, [&](std::ostream& out) { write_ranking(ranking, out); });
  std::fprintf(stderr, "scored %zu edges with %zu rules\n", ranking.size(), model.size());
}

// --- complete --------------------------------------------------------------

struct CompleteArgs {
  GraphArgs in;
  std::string model;
  std::string out;
};

void run_complete(const CompleteArgs& a) {
  const auto g = a.in.load();
  const auto model = read_model_file(a.model, g);
  Json missing = Json::array();
  const auto found = missing_information(model);
  for (const auto& m : found) {
    Json j;
    j["node"] = g.node_names().name(m.node);
    j["rule"] = m.rule;
    j["predicate"] = g.predicate_names().name(m.predicate);
    j["direction"] = to_string(m.direction);
    std::vector<std::string> names;
    for (auto l : m.expected_labels) names.push_back(g.label_names().name(l));
    std::sort(names.begin(), names.end());
    j["expected_labels"] = names;
    j["score"] = m.node_score;
    missing.push_back(std::move(j));
  }
  Json r;
  r["num_rules"] = model.size();
  r["missing"] = std::move(missing);
  emit_json(a.out, r);
  std::fprintf(stderr, "%zu missing-information entries\n", found.size());
}

// --- perturb ---------------------------------------------------------------

struct PerturbArgs {
  GraphArgs in;
  std::string out;
  std::string mode = "anomalies";
  double q = 0.01;
  std::string anomalies = "a1,a2,a3,a4";
  std::uint64_t seed = 0;
};

void write_graph_files(const KnowledgeGraph& g, const std::string& prefix) {
  auto t = open_out(prefix + ".triples.tsv");
  auto l = open_out(prefix + ".labels.tsv");
  write_graph(g, t, l);
}

void run_perturb(const PerturbArgs& a) {
  const auto g = a.in.load();
  Json r;
  r["mode"] = a.mode;
  r["q"] = a.q;
  r["seed"] = a.seed;
  if (a.mode == "anomalies") {
    PerturbationSpec spec;
    spec.q = a.q;
    spec.types = parse_anomaly_list(a.anomalies);
    spec.seed = a.seed;
    auto res = perturb(g, spec);
    write_graph_files(res.graph, a.out);
    emit_json(a.out + ".truth.json", edge_truth_to_json(res.truth));
    emit(a.out + ".test.tsv", [&](std::ostream& out) { write_triples(res.truth.test, out); });
    Json types = Json::array();
    for (auto t : spec.types) types.push_back(to_string(t));
    r["anomalies"] = std::move(types);
    r["graph"] = graph_json(res.graph);
    r["perturbed_edges"] = res.truth.perturbed.size();
    r["clean_edges"] = res.truth.clean.size();
    r["validation_edges"] = res.truth.validation.size();
    r["test_edges"] = res.truth.test.size();
  } else if (a.mode == "pca") {
    auto res = remove_nodes_pca(g, a.q, a.seed);
    write_graph_files(res.graph, a.out);
    emit_json(a.out + ".truth.json", removal_truth_to_json(res.truth));
    r["graph"] = graph_json(res.graph);
    r["removed_nodes"] = res.truth.removed.size();
    r["validation_nodes"] = res.truth.validation.size();
    r["test_nodes"] = res.truth.test.size();
  } else {
    throw ConfigError("unknown perturbation mode '" + a.mode + "' (expected anomalies|pca)");
  }
  r["files"] = Json::array({a.out + ".triples.tsv", a.out + ".labels.tsv", a.out + ".truth.json"});
  if (a.mode == "anomalies") r["files"].push_back(a.out + ".test.tsv");
  emit_json("", r);
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string truth;
  std::string ranking;
  std::string model;
  std::string graph;
  std::string labels;
  std::string out;
  std::size_t top_k = 100;
};

Json metrics_json(const MetricsReport& m, std::size_t k) {
  const auto suffix = "_at_" + std::to_string(k);
  Json j;
  j["auc"] = m.auc;
  j["p" + suffix] = m.precision_at_k;
  j["r" + suffix] = m.recall_at_k;
  j["f1" + suffix] = m.f1_at_k;
  j["cutoff"] = m.cutoff;
  j["positives"] = m.positives;
  j["negatives"] = m.negatives;
  return j;
}

void run_evaluate(const EvaluateArgs& a) {
  std::ifstream in(a.truth);
  if (!in) throw Error("cannot open truth file '" + a.truth + "'");
  Json truth;
  try {
    truth = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw StructuralError(std::string("malformed truth document: ") + e.what());
  }
  const auto mode = truth.value("mode", std::string());
  Json r;
  if (mode == "anomalies") {
    if (a.ranking.empty()) throw ConfigError("--ranking is required for anomaly truth");
    const auto t = edge_truth_from_json(truth);
    const auto ranking = read_ranking_file(a.ranking);
    r = metrics_json(compute_metrics(ranking, t, std::nullopt, a.top_k), a.top_k);
    Json by_type = Json::object();
    std::vector<AnomalyType> present;
    for (const auto& p : t.perturbed)
      if (std::find(present.begin(), present.end(), p.type) == present.end()) present.push_back(p.type);
    std::sort(present.begin(), present.end());
    for (auto type : present) by_type[to_string(type)] = metrics_json(compute_metrics(ranking, t, type, a.top_k), a.top_k);
    r["by_type"] = std::move(by_type);
  } else if (mode == "pca") {
    if (a.model.empty() || a.graph.empty() || a.labels.empty())
      throw ConfigError("--model, --graph and --labels are required for removal truth");
    const auto t = removal_truth_from_json(truth);
    const auto g = load_graph_files(a.graph, a.labels);
    const auto model = read_model_file(a.model, g);
    const auto c = completeness(model, t);
    r["recall"] = c.recall;
    r["recall_label"] = c.recall_label;
    r["evaluated_nodes"] = c.evaluated;
  } else {
    throw StructuralError("truth document has unknown mode '" + mode + "'");
  }
  emit_json(a.out, r);
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  SyntheticSpec spec;
  std::string out;
};

void run_synth(const SynthArgs& a) {
  const auto g = make_synthetic(a.spec);
  write_graph_files(g, a.out);
  Json r;
  r["graph"] = graph_json(g);
  r["files"] = Json::array({a.out + ".triples.tsv", a.out + ".labels.tsv"});
  emit_json("", r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Summarize knowledge graphs with MDL rules; score anomalies and missing information"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for parallel kernels (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  SummarizeArgs sa;
  auto* summarize_cmd = app.add_subcommand("summarize", "Mine a rule model and report its compression");
  sa.in.add(summarize_cmd);
  summarize_cmd->add_option("--out", sa.out, "Model file to write (JSON)")->required();
  summarize_cmd->add_option("--report", sa.report, "Report file (JSON); stdout if omitted");
  summarize_cmd->add_option("--refine", sa.refine, "none|merge|nest (nest also merges)")
      ->check(CLI::IsMember({"none", "merge", "nest"}));
  summarize_cmd->add_option("--selector", sa.selector, "mdl|freq|coverage")
      ->check(CLI::IsMember({"mdl", "freq", "coverage"}));
  summarize_cmd->add_option("--max-passes", sa.max_passes, "Selection passes over the candidates")
      ->check(CLI::PositiveNumber);
  summarize_cmd->add_option("--top-k", sa.top_k, "Rules kept by the freq/coverage selectors")
      ->check(CLI::PositiveNumber);
  summarize_cmd->add_option("--label-cap", sa.label_cap, "Only use the N most frequent labels in candidates")
      ->check(CLI::PositiveNumber);

  ScoreArgs sc;
  auto* score_cmd = app.add_subcommand("score", "Rank test edges by anomaly score (TSV s p o score)");
  sc.in.add(score_cmd);
  score_cmd->add_option("--model", sc.model, "Model file")->required();
  score_cmd->add_option("--test", sc.test, "Edges to score (s<TAB>p<TAB>o)")->required();
  score_cmd->add_option("--out", sc.out, "Ranking file; stdout if omitted");

  CompleteArgs ca;
  auto* complete_cmd = app.add_subcommand("complete", "Report where rules expect missing information");
  ca.in.add(complete_cmd);
  complete_cmd->add_option("--model", ca.model, "Model file")->required();
  complete_cmd->add_option("--out", ca.out, "Report file; stdout if omitted");

  PerturbArgs pa;
  auto* perturb_cmd = app.add_subcommand("perturb", "Inject anomalies or remove nodes, writing ground truth");
  pa.in.add(perturb_cmd);
  perturb_cmd->add_option("--out", pa.out, "Output prefix")->required();
  perturb_cmd->add_option("--mode", pa.mode, "anomalies|pca")->check(CLI::IsMember({"anomalies", "pca"}));
  perturb_cmd->add_option("--q", pa.q, "Fraction of nodes sampled (per anomaly type)");
  perturb_cmd->add_option("--anomalies", pa.anomalies, "Comma-separated subset of a1,a2,a3,a4");
  perturb_cmd->add_option("--seed", pa.seed, "Random seed");

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a ranking or a model against ground truth");
  evaluate_cmd->add_option("--truth", ea.truth, "Truth file written by perturb")->required();
  evaluate_cmd->add_option("--ranking", ea.ranking, "Ranking written by score (anomaly truth)");
  evaluate_cmd->add_option("--model", ea.model, "Model mined on the reduced graph (removal truth)");
  evaluate_cmd->add_option("--graph", ea.graph, "Reduced graph triples (removal truth)");
  evaluate_cmd->add_option("--labels", ea.labels, "Reduced graph labels (removal truth)");
  evaluate_cmd->add_option("--top-k", ea.top_k, "Cutoff for precision/recall")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--out", ea.out, "Report file; stdout if omitted");

  SynthArgs ya;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a graph with planted rule patterns");
  synth_cmd->add_option("--out", ya.out, "Output prefix")->required();
  synth_cmd->add_option("--nodes", ya.spec.nodes, "Number of nodes");
  synth_cmd->add_option("--types", ya.spec.types, "Number of node classes (one planted pattern each)");
  synth_cmd->add_option("--sublabels", ya.spec.sublabels, "Extra labels per class");
  synth_cmd->add_option("--stride", ya.spec.stride, "Pattern t links class t to class t + stride");
  synth_cmd->add_option("--fanout-min", ya.spec.fanout_min, "Minimum planted out-degree");
  synth_cmd->add_option("--fanout-max", ya.spec.fanout_max, "Maximum planted out-degree");
  synth_cmd->add_option("--noise", ya.spec.noise, "Random edges as a fraction of planted edges");
  synth_cmd->add_option("--seed", ya.spec.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every usage error is a configuration error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    set_thread_count(threads);
    if (*summarize_cmd) run_summarize(sa);
    else if (*score_cmd) run_score(sc);
    else if (*complete_cmd) run_complete(ca);
    else if (*perturb_cmd) run_perturb(pa);
    else if (*evaluate_cmd) run_evaluate(ea);
    else if (*synth_cmd) run_synth(ya);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
