#include "textgcn/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "textgcn/checkpoint.hpp"
#include "textgcn/error.hpp"
#include "textgcn/experiment.hpp"
#include "textgcn/metrics.hpp"
#include "textgcn/report.hpp"

namespace textgcn {

namespace {

struct SynthArgs {
  BlobSpec spec;
  std::string out;
};

struct GraphArgs {
  std::string data, out, method = "knn", metric = "euclidean";
  std::size_t k = 5;
  double eps = 0.0;
  bool normalize = false;
};

struct TrainArgs {
  std::string data, graph, model = "gcn", split, split_out, out, metrics;
  std::optional<std::size_t> budget;
  std::uint64_t split_seed = 0;
  bool uniform = false;
  bool normalize = false;
  std::optional<double> lr;
  std::optional<std::size_t> epochs;
  std::size_t hidden = 16;
  double weight_decay = 0.0;
  double l2 = 1e-4;
  std::uint64_t init_seed = 0;
};

struct ExperimentArgs {
  std::string config, out, markdown;
};

struct EvalArgs {
  std::string checkpoint, data, graph, split;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

LabeledSplit read_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open split file " + path);
  return parse_split(in);
}

int do_synth(const SynthArgs& a, std::ostream& out) {
  save_dataset(a.out, synth_blobs(a.spec));
  out << "wrote " << a.spec.n << " x " << a.spec.dim << " blobs to " << a.out << '\n';
  return 0;
}

int do_build_graph(const GraphArgs& a, std::ostream& out) {
  GraphBuildConfig cfg;
  cfg.method = parse_graph_method(a.method);
  cfg.metric = parse_metric(a.metric);
  cfg.k = a.k;
  cfg.eps = a.eps;
  const EmbeddingDataset ds = load_dataset(a.data);
  cfg.validate(ds.size());
  const SparseAdjacency g = build_graph(a.normalize ? l2_normalize_rows(ds.x) : ds.x, cfg);
  save_graph(a.out, g);
  out << "wrote " << g.num_edges() << " edges over " << g.num_nodes() << " nodes to " << a.out << '\n';
  return 0;
}

int do_train(const TrainArgs& a, std::ostream& out) {
  const EmbeddingDataset ds = load_dataset(a.data);
  const Matrix x = a.normalize ? l2_normalize_rows(ds.x) : ds.x;

  LabeledSplit split;
  if (!a.split.empty()) {
    split = read_split(a.split);
    if (split.labeled.size() + split.unlabeled.size() != ds.size())
      throw ValidationError("split file node count differs from dataset size");
  } else if (a.budget) {
    split = make_split(ds, *a.budget, a.split_seed, !a.uniform);
  } else {
    throw ValidationError("train needs --split or --budget");
  }
  if (!a.split_out.empty()) {
    std::ofstream f(a.split_out);
    if (!f) throw std::runtime_error("cannot write " + a.split_out);
    write_split(f, split);
  }

  nlohmann::json metrics;
  metrics["model"] = a.model;
  metrics["labeled"] = split.labeled.size();
  metrics["unlabeled"] = split.unlabeled.size();
  std::vector<int> pred;
  if (a.model == "gcn") {
    if (a.graph.empty()) throw ValidationError("gcn training needs --graph");
    const SparseAdjacency g = load_graph(a.graph);
    if (g.num_nodes() != ds.size()) throw ValidationError("graph node count differs from dataset size");
    const PropagationMatrix s = normalize(g);
    Hyperparams hp;
    hp.lr = a.lr.value_or(hp.lr);
    hp.epochs = a.epochs.value_or(hp.epochs);
    hp.hidden = a.hidden;
    hp.weight_decay = a.weight_decay;
    hp.seed = a.init_seed;
    hp.validate();
    const LabelMatrix y = build_label_matrix(ds, split);
    TrainResult r = train(init_model(x.cols(), hp.hidden, static_cast<std::size_t>(ds.num_classes), hp.seed), s, x, y,
                          split.labeled, hp);
    metrics["initial_loss"] = r.loss_trace.front();
    metrics["final_loss"] = r.loss_trace.back();
    pred = predict(forward(r.model, s, x));
    save_checkpoint(a.out, GcnCheckpoint{std::move(r.model), hp, a.normalize});
  } else if (a.model == "logreg") {
    LogRegParams params;
    params.lr = a.lr.value_or(params.lr);
    params.epochs = a.epochs.value_or(params.epochs);
    params.l2 = a.l2;
    std::vector<int> y;
    for (auto i : split.labeled) {
      if (!ds.has_truth() || ds.truth[i] == kNoLabel)
        throw ValidationError("labeled node " + std::to_string(i) + " has no ground truth");
      y.push_back(ds.truth[i]);
    }
    auto r = train_logreg(select_rows(x, split.labeled), y, static_cast<std::size_t>(ds.num_classes), params);
    metrics["initial_loss"] = r.loss_trace.front();
    metrics["final_loss"] = r.loss_trace.back();
    pred = predict_logreg(r.model, x);
    save_checkpoint(a.out, LogRegCheckpoint{std::move(r.model), params, a.normalize});
  } else {
    throw ValidationError("unknown model '" + a.model + "' (expected gcn or logreg)");
  }

  if (ds.has_truth()) {
    std::vector<int> p, t;
    for (auto i : split.unlabeled)
      if (ds.truth[i] != kNoLabel) {
        p.push_back(pred[i]);
        t.push_back(ds.truth[i]);
      }
    if (!p.empty()) metrics["unlabeled_accuracy_pct"] = accuracy(p, t);
  }
  const std::string text = metrics.dump(2) + "\n";
  if (a.metrics.empty())
    out << text;
  else
    write_text(a.metrics, text);
  return 0;
}

int do_experiment(const ExperimentArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = load_config(a.config);
  const EvalReport report = run_experiment(cfg);
  write_text(a.out, render_report(report, ReportFormat::csv));
  if (!a.markdown.empty()) write_text(a.markdown, render_report(report, ReportFormat::markdown));
  out << render_report(report, ReportFormat::markdown);
  return 0;
}

int do_eval(const EvalArgs& a, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const EmbeddingDataset ds = load_dataset(a.data);
  if (!ds.has_truth()) throw ValidationError("eval needs a dataset with labels");

  std::vector<std::size_t> scored;
  if (!a.split.empty()) {
    const LabeledSplit split = read_split(a.split);
    if (split.labeled.size() + split.unlabeled.size() != ds.size())
      throw ValidationError("split file node count differs from dataset size");
    scored = split.unlabeled;
  } else {
    for (std::size_t i = 0; i < ds.size(); ++i) scored.push_back(i);
  }

  std::vector<int> pred;
  if (const auto* g = std::get_if<GcnCheckpoint>(&ckpt)) {
    if (a.graph.empty()) throw ValidationError("evaluating a gcn checkpoint needs --graph");
    const SparseAdjacency graph = load_graph(a.graph);
    if (graph.num_nodes() != ds.size()) throw ValidationError("graph node count differs from dataset size");
    const Matrix x = g->normalize_features ? l2_normalize_rows(ds.x) : ds.x;
    pred = predict(forward(g->model, normalize(graph), x));
  } else {
    const auto& l = std::get<LogRegCheckpoint>(ckpt);
    pred = predict_logreg(l.model, l.normalize_features ? l2_normalize_rows(ds.x) : ds.x);
  }

  std::vector<int> p, t;
  for (auto i : scored)
    if (ds.truth[i] != kNoLabel) {
      p.push_back(pred[i]);
      t.push_back(ds.truth[i]);
    }
  if (p.empty()) throw ValidationError("no labeled rows to score");
  nlohmann::json result{{"scored", p.size()}, {"accuracy_pct", accuracy(p, t)}};
  out << result.dump(2) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-supervised text classification with graph convolutional networks", "textgcn"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a Gaussian-blob embedding CSV");
  synth_cmd->add_option("--n", synth.spec.n, "Number of points")->capture_default_str();
  synth_cmd->add_option("--dim", synth.spec.dim, "Embedding dimension")->capture_default_str();
  synth_cmd->add_option("--classes", synth.spec.classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--sep", synth.spec.separation, "Distance between cluster centers")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output CSV")->required();

  GraphArgs graph;
  auto* graph_cmd = app.add_subcommand("build-graph", "Build a similarity graph edge list from an embedding CSV");
  graph_cmd->add_option("--data", graph.data, "Embedding CSV")->required();
  graph_cmd->add_option("--method", graph.method, "knn, epsilon or full")->capture_default_str();
  graph_cmd->add_option("--k", graph.k, "Neighbors per node (knn)")->capture_default_str();
  graph_cmd->add_option("--eps", graph.eps, "Distance threshold (epsilon)");
  graph_cmd->add_option("--metric", graph.metric, "euclidean or cosine")->capture_default_str();
  graph_cmd->add_flag("--normalize-features", graph.normalize, "L2-normalize rows first");
  graph_cmd->add_option("--out", graph.out, "Output edge list")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train one model and write a checkpoint");
  train_cmd->add_option("--data", train_args.data, "Embedding CSV")->required();
  train_cmd->add_option("--graph", train_args.graph, "Edge list (gcn)");
  train_cmd->add_option("--model", train_args.model, "gcn or logreg")->capture_default_str();
  train_cmd->add_option("--split", train_args.split, "Split file listing labeled nodes");
  train_cmd->add_option("--budget", train_args.budget, "Draw a split with this many labeled nodes");
  train_cmd->add_option("--split-seed", train_args.split_seed, "Seed for --budget")->capture_default_str();
  train_cmd->add_flag("--uniform", train_args.uniform, "Uniform instead of stratified sampling");
  train_cmd->add_option("--split-out", train_args.split_out, "Write the split used");
  train_cmd->add_flag("--normalize-features", train_args.normalize, "L2-normalize rows first");
  train_cmd->add_option("--lr", train_args.lr, "Learning rate (gcn 0.2, logreg 0.5)");
  train_cmd->add_option("--epochs", train_args.epochs, "Epochs (gcn 200, logreg 500)");
  train_cmd->add_option("--hidden", train_args.hidden, "GCN hidden width")->capture_default_str();
  train_cmd->add_option("--weight-decay", train_args.weight_decay, "GCN weight decay")->capture_default_str();
  train_cmd->add_option("--l2", train_args.l2, "Logistic regression L2 penalty")->capture_default_str();
  train_cmd->add_option("--init-seed", train_args.init_seed, "GCN initialization seed")->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "Checkpoint path")->required();
  train_cmd->add_option("--metrics", train_args.metrics, "Metrics JSON path (default stdout)");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a label-budget sweep from a JSON config");
  exp_cmd->add_option("--config", exp.config, "Experiment config JSON")->required();
  exp_cmd->add_option("--out", exp.out, "Report CSV")->required();
  exp_cmd->add_option("--markdown", exp.markdown, "Also write a markdown table");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint against labeled data");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--data", eval.data, "Embedding CSV with labels")->required();
  eval_cmd->add_option("--graph", eval.graph, "Edge list (gcn)");
  eval_cmd->add_option("--split", eval.split, "Score only the unlabeled nodes of this split");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*synth_cmd) return do_synth(synth, out);
    if (*graph_cmd) return do_build_graph(graph, out);
    if (*train_cmd) return do_train(train_args, out);
    if (*exp_cmd) return do_experiment(exp, out);
    if (*eval_cmd) return do_eval(eval, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace textgcn
