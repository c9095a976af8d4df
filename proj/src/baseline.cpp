#include "textgcn/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "textgcn/error.hpp"
#include "textgcn/gcn.hpp"

namespace textgcn {

void LogRegParams::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("logreg learning rate must be finite and >= 0");
  if (!(l2 >= 0.0)) throw ValidationError("logreg l2 penalty must be >= 0");
}

namespace {

void check(const LogRegModel& model, const Matrix& x, std::span<const int> y) {
  if (x.cols() != model.w.rows()) throw ValidationError("logreg: feature width does not match model");
  if (model.b.size() != model.w.cols()) throw ValidationError("logreg: bias length does not match class count");
  if (y.size() != x.rows()) throw ValidationError("logreg: label count differs from row count");
  for (int c : y)
    if (c < 0 || static_cast<std::size_t>(c) >= model.b.size()) throw ValidationError("logreg: class index out of range");
}

}  // namespace

Matrix logreg_logits(const LogRegModel& model, const Matrix& x) {
  if (x.cols() != model.w.rows()) throw ValidationError("logreg: feature width does not match model");
  Matrix logits = matmul(x, model.w);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto r = logits.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] += model.b[c];
  }
  return logits;
}

double logreg_loss(const LogRegModel& model, const Matrix& x, std::span<const int> y, double l2) {
  check(model, x, y);
  const Matrix logits = logreg_logits(model, x);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto r = logits.row(i);
    const double m = *std::ranges::max_element(r);
    double acc = 0.0;
    for (double v : r) acc += std::exp(v - m);
    total += m + std::log(acc) - r[static_cast<std::size_t>(y[i])];
  }
  double value = x.rows() > 0 ? total / static_cast<double>(x.rows()) : 0.0;
  if (l2 > 0.0) value += 0.5 * l2 * squared_norm(model.w);
  return value;
}

LogRegGradients logreg_gradient(const LogRegModel& model, const Matrix& x, std::span<const int> y, double l2) {
  check(model, x, y);
  const Matrix logits = logreg_logits(model, x);
  const double scale = x.rows() > 0 ? 1.0 / static_cast<double>(x.rows()) : 0.0;
  Matrix residual(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto p = softmax_row(logits.row(i));
    auto out = residual.row(i);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = scale * p[c];
    out[static_cast<std::size_t>(y[i])] -= scale;
  }
  LogRegGradients g;
  g.w = matmul_tn(x, residual);
  if (l2 > 0.0) {
    auto gv = g.w.values();
    auto wv = model.w.values();
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += l2 * wv[i];
  }
  g.b.assign(residual.cols(), 0.0);
  for (std::size_t i = 0; i < residual.rows(); ++i)
    for (std::size_t c = 0; c < residual.cols(); ++c) g.b[c] += residual(i, c);
  return g;
}

LogRegTrainResult train_logreg(const Matrix& x_labeled, std::span<const int> y_labeled, std::size_t num_classes,
                               const LogRegParams& params) {
  params.validate();
  if (x_labeled.rows() < 1) throw ValidationError("logreg: need at least one labeled row");
  if (num_classes < 1) throw ValidationError("logreg: class count must be positive");

  LogRegTrainResult result;
  result.model.w = Matrix(x_labeled.cols(), num_classes);
  result.model.b.assign(num_classes, 0.0);
  auto& model = result.model;
  for (std::size_t epoch = 0;; ++epoch) {
    const double value = logreg_loss(model, x_labeled, y_labeled, params.l2);
    if (!std::isfinite(value)) throw DivergenceError("logreg loss became non-finite at epoch " + std::to_string(epoch));
    result.loss_trace.push_back(value);
    if (epoch == params.epochs) break;
    const LogRegGradients g = logreg_gradient(model, x_labeled, y_labeled, params.l2);
    auto wv = model.w.values();
    auto gv = g.w.values();
    for (std::size_t i = 0; i < wv.size(); ++i) wv[i] -= params.lr * gv[i];
    for (std::size_t c = 0; c < model.b.size(); ++c) model.b[c] -= params.lr * g.b[c];
  }
  return result;
}

std::vector<int> predict_logreg(const LogRegModel& model, const Matrix& x) {
  return argmax_rows(logreg_logits(model, x));
}

}  // namespace textgcn
