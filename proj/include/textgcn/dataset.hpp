#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "textgcn/matrix.hpp"

namespace textgcn {

/// Class index used for rows whose label cell is empty.
inline constexpr int kNoLabel = -1;

/// Embedding vectors for a corpus of texts, one row per text.
struct EmbeddingDataset {
  std::vector<std::string> ids;
  Matrix x;  // n x L1
  /// Empty when the source had no label column; otherwise n entries, each a
  /// class in [0, num_classes) or kNoLabel.
  std::vector<int> truth;
  int num_classes = 2;
  /// When the source used string labels: class index -> original label, sorted.
  std::vector<std::string> class_names;

  std::size_t size() const { return x.rows(); }
  std::size_t dim() const { return x.cols(); }
  bool has_truth() const { return !truth.empty(); }
  /// True when every row carries a class.
  bool fully_labeled() const;

  /// Throws ValidationError on any broken invariant.
  void validate() const;
};

/// Reads the embedding CSV format:
///
///     #classes=5            (optional)
///     id,label,e0,e1,...    (label column optional)
///     doc-1,3,0.25,-1.5,...
///
/// Labels that are all integers are used as class indices; otherwise the
/// distinct strings are sorted and numbered. Errors name the data row.
EmbeddingDataset parse_dataset(std::istream& in);
EmbeddingDataset load_dataset(const std::filesystem::path& path);

/// Writes the same format with 17 significant digits, so a reload is bit-exact.
void write_dataset(std::ostream& out, const EmbeddingDataset& ds);
void save_dataset(const std::filesystem::path& path, const EmbeddingDataset& ds);

struct BlobSpec {
  std::size_t n = 300;
  std::size_t dim = 8;
  int classes = 3;
  double separation = 6.0;
  std::uint64_t seed = 0;
};

/// Isotropic unit-variance Gaussian clusters. Point i belongs to class
/// i % classes. Centers sit at (separation / sqrt 2) * e_c when
/// dim >= classes, giving pairwise distance exactly `separation`; otherwise
/// they are spaced `separation` apart along the first axis.
EmbeddingDataset synth_blobs(const BlobSpec& spec);

/// Scales every nonzero row to unit Euclidean length.
Matrix l2_normalize_rows(const Matrix& x);

/// Partition of node indices; both lists ascending.
struct LabeledSplit {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> unlabeled;
};

/// Samples `labeled_count` nodes without replacement.
///
/// Uniform: shuffle 0..n-1 with Rng(seed) and take the first l.
/// Stratified: quota l / C per class; the l % C leftover slots go to the
/// first classes of a shuffled class order; each class's members are then
/// shuffled and its quota taken from the front.
LabeledSplit make_split(const EmbeddingDataset& ds, std::size_t labeled_count, std::uint64_t seed,
                        bool stratified = true);

/// Split file: `#nodes=<n>` then one labeled index per line.
void write_split(std::ostream& out, const LabeledSplit& split);
LabeledSplit parse_split(std::istream& in);

/// The n x C matrix with a one-hot row per labeled node and zeros elsewhere.
struct LabelMatrix {
  Matrix y;
};

LabelMatrix build_label_matrix(const EmbeddingDataset& ds, const LabeledSplit& split);

}  // namespace textgcn
