#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "textgcn/dataset.hpp"
#include "textgcn/graph.hpp"
#include "textgcn/matrix.hpp"

namespace textgcn {

/// Two-layer graph convolutional network:
///   Z = softmax(S * ReLU(S * X * theta1) * theta2)
/// with S the renormalized propagation matrix.
struct GcnModel {
  Matrix theta1;  // L1 x L2
  Matrix theta2;  // L2 x C

  std::size_t input_dim() const { return theta1.rows(); }
  std::size_t hidden_dim() const { return theta1.cols(); }
  std::size_t num_classes() const { return theta2.cols(); }
};

struct Hyperparams {
  double lr = 0.2;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  std::size_t hidden = 16;
  double weight_decay = 0.0;

  void validate() const;
};

/// Glorot-uniform initialization: entries uniform in +-sqrt(6 / (fan_in + fan_out)).
GcnModel init_model(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes, std::uint64_t seed);

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
Matrix relu(const Matrix& m);

/// exp(z_i - max z) / sum_j exp(z_j - max z).
std::vector<double> softmax_row(std::span<const double> z);

/// Layer intermediates kept for backpropagation.
struct ForwardCache {
  Matrix sx;   // S * X
  Matrix a1;   // (S * X) * theta1
  Matrix h1;   // ReLU(a1)
  Matrix sh1;  // S * h1
  Matrix a2;   // (S * h1) * theta2, the logits
  Matrix z;    // row-softmax(a2)
};

ForwardCache forward(const GcnModel& model, const PropagationMatrix& s, const Matrix& x);

/// -sum over labeled k, classes c of Y_kc ln Z_kc, evaluated from the logits
/// as Y_kc (logsumexp(a2_k) - a2_kc) so that tiny probabilities stay finite.
double loss(const ForwardCache& cache, const LabelMatrix& y, std::span<const std::size_t> labeled);

struct Gradients {
  Matrix theta1;
  Matrix theta2;
};

/// Analytic gradient of loss() plus weight_decay * theta.
///   G2 = (Z - Y) on labeled rows, 0 elsewhere
///   dtheta2 = (S h1)^T G2
///   G1 = (S G2 theta2^T) masked where a1 > 0
///   dtheta1 = (S X)^T G1
Gradients backward(const GcnModel& model, const PropagationMatrix& s, const Matrix& x, const ForwardCache& cache,
                   const LabelMatrix& y, std::span<const std::size_t> labeled, double weight_decay = 0.0);

/// loss() + weight_decay / 2 * (|theta1|^2 + |theta2|^2), the quantity
/// whose gradient backward() returns.
double objective(const GcnModel& model, const ForwardCache& cache, const LabelMatrix& y,
                 std::span<const std::size_t> labeled, double weight_decay);

struct TrainResult {
  GcnModel model;
  /// objective() before the first update and after each of the epochs.
  std::vector<double> loss_trace;
};

/// Full-batch gradient descent: theta <- theta - lr * grad, `epochs` times.
/// Throws DivergenceError if the objective stops being finite.
TrainResult train(GcnModel model, const PropagationMatrix& s, const Matrix& x, const LabelMatrix& y,
                  std::span<const std::size_t> labeled, const Hyperparams& hp);

/// Most probable class per node; ties go to the lowest class index.
std::vector<int> predict(const ForwardCache& cache);

}  // namespace textgcn
