#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "textgcn/matrix.hpp"

namespace textgcn {

/// Multinomial logistic regression: P(c | x) = softmax(x W + b)_c.
struct LogRegModel {
  Matrix w;               // L1 x C
  std::vector<double> b;  // C
};

struct LogRegParams {
  double lr = 0.5;
  std::size_t epochs = 500;
  double l2 = 1e-4;

  void validate() const;
};

/// Mean cross-entropy over the rows of x plus l2 / 2 * |W|^2 (bias unpenalized).
double logreg_loss(const LogRegModel& model, const Matrix& x, std::span<const int> y, double l2);

struct LogRegGradients {
  Matrix w;
  std::vector<double> b;
};

LogRegGradients logreg_gradient(const LogRegModel& model, const Matrix& x, std::span<const int> y, double l2);

struct LogRegTrainResult {
  LogRegModel model;
  std::vector<double> loss_trace;  // epochs + 1 entries
};

/// Full-batch gradient descent from W = 0, b = 0. Sees only the labeled rows
/// it is handed. Throws DivergenceError on a non-finite loss.
LogRegTrainResult train_logreg(const Matrix& x_labeled, std::span<const int> y_labeled, std::size_t num_classes,
                               const LogRegParams& params);

/// x W + b for every row.
Matrix logreg_logits(const LogRegModel& model, const Matrix& x);

/// argmax of the logits per row, lowest index on ties.
std::vector<int> predict_logreg(const LogRegModel& model, const Matrix& x);

}  // namespace textgcn
