#include "textgcn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "textgcn/error.hpp"
#include "textgcn/metrics.hpp"
#include "textgcn/rng.hpp"

namespace textgcn {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("config: unknown field '" + key + "' in " + where);
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    reject_unknown(j,
                   {"version", "dataset", "graph", "models", "budgets", "repeats", "seed", "stratified",
                    "normalize_features", "record_wall_time", "threads", "gcn", "logreg"},
                   "top level");
    cfg.version = get_or(j, "version", 1);
    if (cfg.version != 1) throw ValidationError("config: unsupported version " + std::to_string(cfg.version));

    if (!j.contains("dataset")) throw ValidationError("config: missing 'dataset'");
    const json& d = j.at("dataset");
    reject_unknown(d, {"path", "synth"}, "dataset");
    if (d.contains("synth") == d.contains("path"))
      throw ValidationError("config: dataset needs exactly one of 'path' or 'synth'");
    if (d.contains("path")) {
      std::filesystem::path p = d.at("path").get<std::string>();
      cfg.dataset_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
      const json& s = d.at("synth");
      reject_unknown(s, {"n", "dim", "classes", "sep", "seed"}, "dataset.synth");
      BlobSpec b;
      b.n = get_or(s, "n", b.n);
      b.dim = get_or(s, "dim", b.dim);
      b.classes = get_or(s, "classes", b.classes);
      b.separation = get_or(s, "sep", b.separation);
      b.seed = get_or(s, "seed", b.seed);
      cfg.synth = b;
    }

    if (j.contains("graph")) {
      const json& g = j.at("graph");
      reject_unknown(g, {"method", "k", "eps", "metric"}, "graph");
      cfg.graph.method = parse_graph_method(get_or<std::string>(g, "method", "knn"));
      cfg.graph.k = get_or(g, "k", cfg.graph.k);
      cfg.graph.eps = get_or(g, "eps", cfg.graph.eps);
      cfg.graph.metric = parse_metric(get_or<std::string>(g, "metric", "euclidean"));
    }
    cfg.models = get_or(j, "models", cfg.models);
    if (!j.contains("budgets")) throw ValidationError("config: missing 'budgets'");
    cfg.budgets = j.at("budgets").get<std::vector<std::size_t>>();
    cfg.repeats = get_or(j, "repeats", cfg.repeats);
    cfg.seed = get_or(j, "seed", cfg.seed);
    cfg.stratified = get_or(j, "stratified", cfg.stratified);
    cfg.normalize_features = get_or(j, "normalize_features", cfg.normalize_features);
    cfg.record_wall_time = get_or(j, "record_wall_time", cfg.record_wall_time);
    cfg.threads = get_or(j, "threads", cfg.threads);

    if (j.contains("gcn")) {
      const json& g = j.at("gcn");
      reject_unknown(g, {"lr", "epochs", "hidden", "weight_decay", "seed"}, "gcn");
      cfg.gcn.lr = get_or(g, "lr", cfg.gcn.lr);
      cfg.gcn.epochs = get_or(g, "epochs", cfg.gcn.epochs);
      cfg.gcn.hidden = get_or(g, "hidden", cfg.gcn.hidden);
      cfg.gcn.weight_decay = get_or(g, "weight_decay", cfg.gcn.weight_decay);
      cfg.gcn.seed = get_or(g, "seed", cfg.gcn.seed);
    }
    if (j.contains("logreg")) {
      const json& l = j.at("logreg");
      reject_unknown(l, {"lr", "epochs", "l2"}, "logreg");
      cfg.logreg.lr = get_or(l, "lr", cfg.logreg.lr);
      cfg.logreg.epochs = get_or(l, "epochs", cfg.logreg.epochs);
      cfg.logreg.l2 = get_or(l, "l2", cfg.logreg.l2);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  if (cfg.models.empty()) throw ValidationError("config: 'models' is empty");
  if (cfg.budgets.empty()) throw ValidationError("config: 'budgets' is empty");
  if (cfg.repeats < 1) throw ValidationError("config: 'repeats' must be at least 1");
  if (cfg.threads < 1) throw ValidationError("config: 'threads' must be at least 1");
  cfg.gcn.validate();
  cfg.logreg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  if (cfg.synth)
    j["dataset"]["synth"] = {{"n", cfg.synth->n},
                             {"dim", cfg.synth->dim},
                             {"classes", cfg.synth->classes},
                             {"sep", cfg.synth->separation},
                             {"seed", cfg.synth->seed}};
  else
    j["dataset"]["path"] = cfg.dataset_path.string();
  j["graph"] = {{"method", to_string(cfg.graph.method)},
                {"k", cfg.graph.k},
                {"eps", cfg.graph.eps},
                {"metric", to_string(cfg.graph.metric)}};
  j["models"] = cfg.models;
  j["budgets"] = cfg.budgets;
  j["repeats"] = cfg.repeats;
  j["seed"] = cfg.seed;
  j["stratified"] = cfg.stratified;
  j["normalize_features"] = cfg.normalize_features;
  j["record_wall_time"] = cfg.record_wall_time;
  j["threads"] = cfg.threads;
  j["gcn"] = {{"lr", cfg.gcn.lr},
              {"epochs", cfg.gcn.epochs},
              {"hidden", cfg.gcn.hidden},
              {"weight_decay", cfg.gcn.weight_decay},
              {"seed", cfg.gcn.seed}};
  j["logreg"] = {{"lr", cfg.logreg.lr}, {"epochs", cfg.logreg.epochs}, {"l2", cfg.logreg.l2}};
  return j.dump(2);
}

ModelRegistry ModelRegistry::with_defaults() {
  ModelRegistry r;
  r.add("gcn", run_gcn);
  r.add("logreg", run_logreg);
  return r;
}

void ModelRegistry::add(std::string name, ModelRunner runner) { runners_[std::move(name)] = std::move(runner); }

const ModelRunner& ModelRegistry::at(const std::string& name) const {
  auto it = runners_.find(name);
  if (it == runners_.end()) throw ValidationError("unknown model '" + name + "'");
  return it->second;
}

std::vector<int> run_gcn(const CellInput& in) {
  const LabelMatrix y = build_label_matrix(in.dataset, in.split);
  Hyperparams hp = in.config.gcn;
  GcnModel init = init_model(in.features.cols(), hp.hidden, static_cast<std::size_t>(in.dataset.num_classes),
                             mix64(in.seed) ^ hp.seed);
  TrainResult trained = train(std::move(init), in.propagation, in.features, y, in.split.labeled, hp);
  return predict(forward(trained.model, in.propagation, in.features));
}

std::vector<int> run_logreg(const CellInput& in) {
  const Matrix x_labeled = select_rows(in.features, in.split.labeled);
  std::vector<int> y_labeled;
  y_labeled.reserve(in.split.labeled.size());
  for (auto i : in.split.labeled) y_labeled.push_back(in.dataset.truth.at(i));
  auto trained = train_logreg(x_labeled, y_labeled, static_cast<std::size_t>(in.dataset.num_classes), in.config.logreg);
  return predict_logreg(trained.model, in.features);
}

EmbeddingDataset load_experiment_dataset(const ExperimentConfig& cfg) {
  return cfg.synth ? synth_blobs(*cfg.synth) : load_dataset(cfg.dataset_path);
}

EvalReport run_experiment(const ExperimentConfig& cfg, const EmbeddingDataset& ds, const ModelRegistry& registry) {
  ds.validate();
  if (!ds.fully_labeled()) throw ValidationError("experiment dataset needs ground truth for every row");
  for (const auto& m : cfg.models) registry.at(m);
  const std::size_t n = ds.size();
  const auto classes = static_cast<std::size_t>(ds.num_classes);
  for (auto l : cfg.budgets) {
    if (l >= n) throw ValidationError("budget " + std::to_string(l) + " must be below n=" + std::to_string(n));
    if (cfg.stratified && l < classes)
      throw ValidationError("budget " + std::to_string(l) + " is below the class count " + std::to_string(classes));
    if (l < 1) throw ValidationError("budgets must be positive");
  }

  const Matrix features = cfg.normalize_features ? l2_normalize_rows(ds.x) : ds.x;
  const PropagationMatrix s = normalize(build_graph(features, cfg.graph));

  struct Cell {
    std::size_t budget;
    std::size_t repeat;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (auto l : cfg.budgets)
    for (std::size_t r = 0; r < cfg.repeats; ++r) cells.push_back({l, r, derive_seed(cfg.seed, l, r)});

  const std::size_t per_cell = cfg.models.size();
  std::vector<ResultRow> rows(cells.size() * per_cell);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      try {
        const Cell& cell = cells[c];
        const LabeledSplit split = make_split(ds, cell.budget, cell.seed, cfg.stratified);
        std::vector<int> truth;
        truth.reserve(split.unlabeled.size());
        for (auto i : split.unlabeled) truth.push_back(ds.truth[i]);
        const CellInput input{ds, features, s, split, cell.seed, cfg};
        for (std::size_t m = 0; m < per_cell; ++m) {
          const auto start = std::chrono::steady_clock::now();
          const std::vector<int> pred = registry.at(cfg.models[m])(input);
          const auto stop = std::chrono::steady_clock::now();
          std::vector<int> scored;
          scored.reserve(split.unlabeled.size());
          for (auto i : split.unlabeled) scored.push_back(pred.at(i));
          ResultRow& row = rows[c * per_cell + m];
          row.model = cfg.models[m];
          row.budget = cell.budget;
          row.repeat = cell.repeat;
          row.seed = cell.seed;
          row.accuracy_pct = accuracy(scored, truth);
          row.wall_ms = cfg.record_wall_time
                            ? std::chrono::duration<double, std::milli>(stop - start).count()
                            : 0.0;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };

  const std::size_t workers = std::min(cfg.threads, cells.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  EvalReport report;
  report.rows = std::move(rows);
  report.aggregates = aggregate(report.rows);
  return report;
}

EvalReport run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, load_experiment_dataset(cfg));
}

}  // namespace textgcn
