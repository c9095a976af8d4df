#include "textgcn/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "textgcn/error.hpp"
#include "textgcn/rng.hpp"

namespace textgcn {

void Hyperparams::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be finite and >= 0");
  if (hidden < 1) throw ValidationError("hidden width must be at least 1");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight decay must be >= 0");
}

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
  return m;
}

void check_shapes(const GcnModel& model, const PropagationMatrix& s, const Matrix& x) {
  if (x.rows() != s.num_nodes())
    throw ValidationError("feature rows (" + std::to_string(x.rows()) + ") differ from graph nodes (" +
                          std::to_string(s.num_nodes()) + ")");
  if (x.cols() != model.input_dim())
    throw ValidationError("feature width " + std::to_string(x.cols()) + " does not match model input " +
                          std::to_string(model.input_dim()));
  if (model.theta2.rows() != model.hidden_dim()) throw ValidationError("theta1 and theta2 disagree on hidden width");
}

double log_sum_exp(std::span<const double> z) {
  const double m = *std::ranges::max_element(z);
  double acc = 0.0;
  for (double v : z) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace

GcnModel init_model(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || num_classes < 1) throw ValidationError("init_model: dimensions must be positive");
  Rng rng(seed);
  GcnModel model;
  model.theta1 = glorot(input_dim, hidden_dim, rng);
  model.theta2 = glorot(hidden_dim, num_classes, rng);
  return model;
}

Matrix relu(const Matrix& m) {
  Matrix out = m;
  for (double& v : out.values()) v = relu(v);
  return out;
}

std::vector<double> softmax_row(std::span<const double> z) {
  std::vector<double> out(z.size());
  if (z.empty()) return out;
  const double m = *std::ranges::max_element(z);
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - m);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

ForwardCache forward(const GcnModel& model, const PropagationMatrix& s, const Matrix& x) {
  check_shapes(model, s, x);
  ForwardCache c;
  c.sx = s.multiply(x);
  c.a1 = matmul(c.sx, model.theta1);
  c.h1 = relu(c.a1);
  c.sh1 = s.multiply(c.h1);
  c.a2 = matmul(c.sh1, model.theta2);
  c.z = Matrix(c.a2.rows(), c.a2.cols());
  for (std::size_t i = 0; i < c.a2.rows(); ++i) std::ranges::copy(softmax_row(c.a2.row(i)), c.z.row(i).begin());
  return c;
}

double loss(const ForwardCache& cache, const LabelMatrix& y, std::span<const std::size_t> labeled) {
  if (y.y.rows() != cache.a2.rows() || y.y.cols() != cache.a2.cols())
    throw ValidationError("label matrix shape does not match model output");
  double total = 0.0;
  for (auto k : labeled) {
    auto logits = cache.a2.row(k);
    const double lse = log_sum_exp(logits);
    auto targets = y.y.row(k);
    for (std::size_t c = 0; c < logits.size(); ++c)
      if (targets[c] != 0.0) total += targets[c] * (lse - logits[c]);
  }
  return total;
}

double objective(const GcnModel& model, const ForwardCache& cache, const LabelMatrix& y,
                 std::span<const std::size_t> labeled, double weight_decay) {
  double value = loss(cache, y, labeled);
  if (weight_decay > 0.0) value += 0.5 * weight_decay * (squared_norm(model.theta1) + squared_norm(model.theta2));
  return value;
}

Gradients backward(const GcnModel& model, const PropagationMatrix& s, const Matrix& x, const ForwardCache& cache,
                   const LabelMatrix& y, std::span<const std::size_t> labeled, double weight_decay) {
  check_shapes(model, s, x);
  const std::size_t n = x.rows();
  const bool fresh = cache.sx.rows() == n && cache.sx.cols() == model.input_dim() && cache.a1.rows() == n &&
                     cache.a1.cols() == model.hidden_dim() && cache.h1.rows() == n && cache.sh1.rows() == n &&
                     cache.z.rows() == n && cache.z.cols() == model.num_classes();
  if (!fresh) throw ValidationError("forward cache does not belong to this model and graph");
  if (y.y.rows() != n || y.y.cols() != model.num_classes())
    throw ValidationError("label matrix shape does not match model output");

  Matrix g2(n, model.num_classes());
  for (auto k : labeled) {
    auto z = cache.z.row(k);
    auto t = y.y.row(k);
    auto out = g2.row(k);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = z[c] - t[c];
  }

  Gradients g;
  g.theta2 = matmul_tn(cache.sh1, g2);

  // S is symmetric, so S^T G2 is just S G2.
  Matrix g1 = matmul_nt(s.multiply(g2), model.theta2);
  auto mask = cache.a1.values();
  auto g1v = g1.values();
  for (std::size_t i = 0; i < g1v.size(); ++i)
    if (!(mask[i] > 0.0)) g1v[i] = 0.0;
  g.theta1 = matmul_tn(cache.sx, g1);

  if (weight_decay > 0.0) {
    auto add = [weight_decay](Matrix& grad, const Matrix& theta) {
      auto gv = grad.values();
      auto tv = theta.values();
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += weight_decay * tv[i];
    };
    add(g.theta1, model.theta1);
    add(g.theta2, model.theta2);
  }
  return g;
}

TrainResult train(GcnModel model, const PropagationMatrix& s, const Matrix& x, const LabelMatrix& y,
                  std::span<const std::size_t> labeled, const Hyperparams& hp) {
  hp.validate();
  TrainResult result;
  result.loss_trace.reserve(hp.epochs + 1);
  for (std::size_t epoch = 0;; ++epoch) {
    ForwardCache cache = forward(model, s, x);
    const double value = objective(model, cache, y, labeled, hp.weight_decay);
    if (!std::isfinite(value)) throw DivergenceError("GCN objective became non-finite at epoch " + std::to_string(epoch));
    result.loss_trace.push_back(value);
    if (epoch == hp.epochs) break;

    Gradients g = backward(model, s, x, cache, y, labeled, hp.weight_decay);
    auto step = [lr = hp.lr](Matrix& theta, const Matrix& grad) {
      auto tv = theta.values();
      auto gv = grad.values();
      for (std::size_t i = 0; i < tv.size(); ++i) tv[i] -= lr * gv[i];
    };
    step(model.theta1, g.theta1);
    step(model.theta2, g.theta2);
    if (!model.theta1.all_finite() || !model.theta2.all_finite())
      throw DivergenceError("GCN parameters became non-finite at epoch " + std::to_string(epoch + 1));
  }
  result.model = std::move(model);
  return result;
}

std::vector<int> predict(const ForwardCache& cache) { return argmax_rows(cache.z); }

}  // namespace textgcn
