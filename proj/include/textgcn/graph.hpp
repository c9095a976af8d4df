#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "textgcn/matrix.hpp"

namespace textgcn {

enum class Metric { euclidean, cosine };
enum class GraphMethod { knn, epsilon, full };

std::string to_string(Metric m);
std::string to_string(GraphMethod m);
Metric parse_metric(std::string_view s);
GraphMethod parse_graph_method(std::string_view s);

struct GraphBuildConfig {
  GraphMethod method = GraphMethod::knn;
  std::size_t k = 5;
  double eps = 0.0;
  Metric metric = Metric::euclidean;

  /// Checks k / eps against a dataset with `n` nodes.
  void validate(std::size_t n) const;
};

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Undirected, unweighted, loop-free graph. Edges are stored once as (i, j)
/// with i < j, sorted lexicographically.
class SparseAdjacency {
 public:
  SparseAdjacency() = default;
  /// Canonicalizes orientation and order; rejects self-loops, duplicates and
  /// out-of-range endpoints.
  SparseAdjacency(std::size_t n, std::vector<Edge> edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::vector<std::size_t> degrees() const;
  bool contains(std::size_t i, std::size_t j) const;

  /// Relabels node i as perm[i].
  SparseAdjacency permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const SparseAdjacency&, const SparseAdjacency&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

/// Euclidean distance, or cosine distance 1 - a.b / (|a| |b|).
/// Throws on dimension mismatch or a zero vector under the cosine metric.
double pairwise_distance(std::span<const double> a, std::span<const double> b, Metric metric);

/// Exact k-nearest-neighbor graph: {i, j} is an edge when either endpoint is
/// among the other's k nearest. Neighbors are ranked by (distance, index), so
/// a tie at the k-th place admits the lower index.
SparseAdjacency knn_graph(const Matrix& x, std::size_t k, Metric metric = Metric::euclidean);

/// {i, j} is an edge iff distance(i, j) < eps.
SparseAdjacency epsilon_graph(const Matrix& x, double eps, Metric metric = Metric::euclidean);

SparseAdjacency full_graph(std::size_t n);

SparseAdjacency build_graph(const Matrix& x, const GraphBuildConfig& cfg);

/// S = D^-1/2 (A + I) D^-1/2 in CSR form, columns ascending within each row.
class PropagationMatrix {
 public:
  std::size_t num_nodes() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  /// Self-loop-augmented degree of each node.
  std::span<const double> degrees() const { return degrees_; }

  /// S * m, accumulating each output row over ascending column index.
  Matrix multiply(const Matrix& m) const;
  Matrix to_dense() const;

 private:
  friend PropagationMatrix normalize(const SparseAdjacency& a);
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
  std::vector<double> degrees_;
};

PropagationMatrix normalize(const SparseAdjacency& a);

/// Edge-list text: optional `#nodes=<n>` header, then `i<TAB>j` per edge with
/// i < j in sorted order. Without the header n is one past the largest index.
void write_graph(std::ostream& out, const SparseAdjacency& a);
SparseAdjacency parse_graph(std::istream& in);
void save_graph(const std::filesystem::path& path, const SparseAdjacency& a);
SparseAdjacency load_graph(const std::filesystem::path& path);

}  // namespace textgcn
