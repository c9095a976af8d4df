#include "textgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

#include "textgcn/error.hpp"
#include "textgcn/text.hpp"

namespace textgcn {

std::string to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "cosine"; }

std::string to_string(GraphMethod m) {
  switch (m) {
    case GraphMethod::knn: return "knn";
    case GraphMethod::epsilon: return "epsilon";
    case GraphMethod::full: return "full";
  }
  return "?";
}

Metric parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "cosine" || s == "cosine-distance") return Metric::cosine;
  throw ValidationError("unknown metric '" + std::string(s) + "'");
}

GraphMethod parse_graph_method(std::string_view s) {
  if (s == "knn") return GraphMethod::knn;
  if (s == "epsilon") return GraphMethod::epsilon;
  if (s == "full") return GraphMethod::full;
  throw ValidationError("unknown graph method '" + std::string(s) + "'");
}

void GraphBuildConfig::validate(std::size_t n) const {
  if (method == GraphMethod::knn && (k < 1 || k + 1 > n))
    throw ValidationError("k must lie in [1, n-1]; got k=" + std::to_string(k) + " for n=" + std::to_string(n));
  if (method == GraphMethod::epsilon && !(eps > 0.0)) throw ValidationError("eps must be positive");
}

SparseAdjacency::SparseAdjacency(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (auto& [i, j] : edges_) {
    if (i == j) throw ValidationError("self-loop at node " + std::to_string(i));
    if (i >= n_ || j >= n_) throw ValidationError("edge endpoint outside [0, " + std::to_string(n_) + ")");
    if (i > j) std::swap(i, j);
  }
  std::ranges::sort(edges_);
  if (auto dup = std::ranges::adjacent_find(edges_); dup != edges_.end())
    throw ValidationError("duplicate edge " + std::to_string(dup->first) + "-" + std::to_string(dup->second));
}

std::vector<std::size_t> SparseAdjacency::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (auto [i, j] : edges_) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool SparseAdjacency::contains(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return std::ranges::binary_search(edges_, Edge{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
}

SparseAdjacency SparseAdjacency::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) throw ValidationError("permutation length differs from node count");
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (auto [i, j] : edges_)
    out.emplace_back(static_cast<std::uint32_t>(perm[i]), static_cast<std::uint32_t>(perm[j]));
  return SparseAdjacency(n_, std::move(out));
}

double pairwise_distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size()) throw ValidationError("pairwise_distance: dimension mismatch");
  if (metric == Metric::euclidean) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("cosine distance is undefined for a zero vector");
  // Clamp rounding so identical directions give exactly 0 and results stay >= 0.
  const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return std::max(0.0, 1.0 - cos);
}

namespace {

// Runs fn(i) for i in [0, n) across worker threads. Each index is handled
// by exactly one worker; callers write only to slot i.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(1, n / 64));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
}

}  // namespace

SparseAdjacency knn_graph(const Matrix& x, std::size_t k, Metric metric) {
  const std::size_t n = x.rows();
  GraphBuildConfig{GraphMethod::knn, k, 0.0, metric}.validate(n);

  std::vector<std::vector<std::uint32_t>> nearest(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, std::uint32_t>> ranked;
    ranked.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) ranked.emplace_back(pairwise_distance(x.row(i), x.row(j), metric), static_cast<std::uint32_t>(j));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    for (std::size_t r = 0; r < k; ++r) nearest[i].push_back(ranked[r].second);
  });

  std::vector<Edge> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : nearest[i]) edges.emplace_back(std::min<std::uint32_t>(i, j), std::max<std::uint32_t>(i, j));
  std::ranges::sort(edges);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return SparseAdjacency(n, std::move(edges));
}

SparseAdjacency epsilon_graph(const Matrix& x, double eps, Metric metric) {
  const std::size_t n = x.rows();
  GraphBuildConfig{GraphMethod::epsilon, 0, eps, metric}.validate(n);
  std::vector<std::vector<Edge>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      if (pairwise_distance(x.row(i), x.row(j), metric) < eps)
        rows[i].emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  });
  std::vector<Edge> edges;
  for (auto& r : rows) edges.insert(edges.end(), r.begin(), r.end());
  return SparseAdjacency(n, std::move(edges));
}

SparseAdjacency full_graph(std::size_t n) {
  if (n < 1) throw ValidationError("full_graph: need at least one node");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return SparseAdjacency(n, std::move(edges));
}

SparseAdjacency build_graph(const Matrix& x, const GraphBuildConfig& cfg) {
  cfg.validate(x.rows());
  switch (cfg.method) {
    case GraphMethod::knn: return knn_graph(x, cfg.k, cfg.metric);
    case GraphMethod::epsilon: return epsilon_graph(x, cfg.eps, cfg.metric);
    case GraphMethod::full: return full_graph(x.rows());
  }
  throw ValidationError("unknown graph method");
}

PropagationMatrix normalize(const SparseAdjacency& a) {
  const std::size_t n = a.num_nodes();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) adj[i].push_back(static_cast<std::uint32_t>(i));
  for (auto [i, j] : a.edges()) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }

  PropagationMatrix s;
  s.degrees_.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.degrees_[i] = static_cast<double>(adj[i].size());

  s.row_ptr_.reserve(n + 1);
  s.row_ptr_.push_back(0);
  s.col_idx_.reserve(2 * a.num_edges() + n);
  s.values_.reserve(2 * a.num_edges() + n);
  for (std::size_t i = 0; i < n; ++i) {
    std::ranges::sort(adj[i]);
    for (auto j : adj[i]) {
      s.col_idx_.push_back(j);
      s.values_.push_back(1.0 / std::sqrt(s.degrees_[i] * s.degrees_[j]));
    }
    s.row_ptr_.push_back(s.col_idx_.size());
  }
  return s;
}

Matrix PropagationMatrix::multiply(const Matrix& m) const {
  if (m.rows() != num_nodes()) throw ValidationError("propagation: row count differs from node count");
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    auto dst = out.row(i);
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const double w = values_[p];
      auto src = m.row(col_idx_[p]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

Matrix PropagationMatrix::to_dense() const {
  Matrix out(num_nodes(), num_nodes());
  for (std::size_t i = 0; i < num_nodes(); ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out(i, col_idx_[p]) = values_[p];
  return out;
}

void write_graph(std::ostream& out, const SparseAdjacency& a) {
  const auto deg = a.degrees();
  if (std::ranges::find(deg, std::size_t{0}) != deg.end()) out << "#nodes=" << a.num_nodes() << '\n';
  for (auto [i, j] : a.edges()) out << i << '\t' << j << '\n';
}

SparseAdjacency parse_graph(std::istream& in) {
  std::optional<std::size_t> nodes;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '#') {
      if (!line.starts_with("#nodes=")) throw FormatError(at + "unknown header");
      nodes = parse_index(std::string_view(line).substr(7));
      if (!nodes) throw FormatError(at + "bad #nodes value");
      continue;
    }
    auto fields = split_fields(line, '\t');
    if (fields.size() != 2) throw FormatError(at + "expected 'i<TAB>j'");
    auto i = parse_index(fields[0]);
    auto j = parse_index(fields[1]);
    if (!i || !j) throw FormatError(at + "node ids must be non-negative integers");
    if (*i == *j) throw FormatError(at + "self-loop at node " + std::to_string(*i));
    if (*i > *j) throw FormatError(at + "edge must be written with i < j");
    Edge e{static_cast<std::uint32_t>(*i), static_cast<std::uint32_t>(*j)};
    if (!edges.empty() && e <= edges.back())
      throw FormatError(at + (e == edges.back() ? "duplicate edge" : "edges out of sorted order"));
    edges.push_back(e);
    max_index = std::max(max_index, *j);
  }
  std::size_t n = nodes.value_or(edges.empty() ? 0 : max_index + 1);
  if (!edges.empty() && max_index >= n) throw FormatError("edge endpoint exceeds #nodes");
  if (n == 0) throw FormatError("empty edge list without a #nodes header");
  return SparseAdjacency(n, std::move(edges));
}

void save_graph(const std::filesystem::path& path, const SparseAdjacency& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path.string());
  write_graph(out, a);
}

SparseAdjacency load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return parse_graph(in);
}

}  // namespace textgcn
