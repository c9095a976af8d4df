#pragma once

// Straight-line reference implementations used only by the tests. They share
// no code with the library beyond the Matrix container.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "textgcn/dataset.hpp"
#include "textgcn/gcn.hpp"
#include "textgcn/graph.hpp"
#include "textgcn/matrix.hpp"
#include "textgcn/rng.hpp"

namespace oracle {

using textgcn::Matrix;
using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

EdgeSet edge_set(const textgcn::SparseAdjacency& a);

/// Sorts every distance per node and applies the OR rule.
EdgeSet brute_force_knn(const Matrix& x, std::size_t k);

/// D^-1/2 (A + I) D^-1/2 with explicit dense diagonal matrices.
Matrix dense_propagation(std::size_t n, const EdgeSet& edges);

/// Naive triple loop.
Matrix dense_matmul(const Matrix& a, const Matrix& b);

/// softmax(S ReLU(S X theta1) theta2) with dense S, evaluated as written.
Matrix dense_forward(const Matrix& s, const Matrix& x, const Matrix& theta1, const Matrix& theta2);

/// Masked cross-entropy computed from probabilities: -sum Y ln Z.
double dense_loss(const Matrix& z, const Matrix& y, const std::vector<std::size_t>& labeled);

/// Central differences of f with respect to every entry of m.
Matrix central_difference(Matrix& m, const std::function<double()>& f, double h);

struct GradCheck {
  double worst_rel = 0.0;
  std::size_t failures = 0;
};

/// Relative error, falling back to an absolute bound where both values are
/// below `small` in magnitude.
GradCheck compare_gradients(const Matrix& analytic, const Matrix& numeric, double rel_tol, double abs_tol,
                            double small);

Matrix random_matrix(std::size_t rows, std::size_t cols, textgcn::Rng& rng, double scale = 1.0);

/// Each node draws k distinct random partners; edges are OR-symmetrized.
textgcn::SparseAdjacency random_knn_style_graph(std::size_t n, std::size_t k, textgcn::Rng& rng);

/// One-hot rows for the labeled nodes with random classes.
textgcn::LabelMatrix random_labels(std::size_t n, std::size_t classes, const std::vector<std::size_t>& labeled,
                                   textgcn::Rng& rng);

}  // namespace oracle
