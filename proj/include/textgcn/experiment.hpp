#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textgcn/baseline.hpp"
#include "textgcn/dataset.hpp"
#include "textgcn/gcn.hpp"
#include "textgcn/graph.hpp"
#include "textgcn/report.hpp"

namespace textgcn {

/// Label-budget sweep. Loaded from JSON (see README for the schema).
struct ExperimentConfig {
  int version = 1;
  std::filesystem::path dataset_path;  // used when synth is empty
  std::optional<BlobSpec> synth;
  GraphBuildConfig graph;
  std::vector<std::string> models{"gcn", "logreg"};
  std::vector<std::size_t> budgets;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  bool normalize_features = false;
  /// Off by default so that reports are byte-reproducible; wall_ms is then 0.
  bool record_wall_time = false;
  std::size_t threads = 1;
  Hyperparams gcn;
  LogRegParams logreg;
};

/// Parses a version-1 config. A relative dataset path is resolved against base_dir.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Everything one model needs for one (budget, repeat) cell.
struct CellInput {
  const EmbeddingDataset& dataset;
  const Matrix& features;  // possibly row-normalized copy of dataset.x
  const PropagationMatrix& propagation;
  const LabeledSplit& split;
  std::uint64_t seed;
  const ExperimentConfig& config;
};

/// Returns a class prediction for every node.
using ModelRunner = std::function<std::vector<int>(const CellInput&)>;

class ModelRegistry {
 public:
  /// gcn and logreg.
  static ModelRegistry with_defaults();

  void add(std::string name, ModelRunner runner);
  const ModelRunner& at(const std::string& name) const;
  bool contains(const std::string& name) const { return runners_.contains(name); }

 private:
  std::map<std::string, ModelRunner> runners_;
};

/// GCN on (S, X, Y); only the labeled rows of Y are nonzero.
std::vector<int> run_gcn(const CellInput& in);
/// Logistic regression fitted to the labeled rows alone.
std::vector<int> run_logreg(const CellInput& in);

/// Builds the graph once, then for every budget l and repeat r derives
/// seed = derive_seed(base, l, r), draws a split, trains each model and
/// scores it on all unlabeled nodes. Rows come out ordered by
/// (budget, repeat, model) regardless of thread count.
EvalReport run_experiment(const ExperimentConfig& cfg, const EmbeddingDataset& ds,
                          const ModelRegistry& registry = ModelRegistry::with_defaults());
EvalReport run_experiment(const ExperimentConfig& cfg);

/// Dataset named by the config (file or synthetic blobs).
EmbeddingDataset load_experiment_dataset(const ExperimentConfig& cfg);

}  // namespace textgcn
