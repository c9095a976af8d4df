#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "textgcn/baseline.hpp"
#include "textgcn/dataset.hpp"
#include "textgcn/error.hpp"
#include "textgcn/gcn.hpp"

using namespace textgcn;

TEST_SUITE("baseline") {
  TEST_CASE("zero epochs leaves the zero model, which predicts class 0") {
    Rng rng(1);
    auto x = oracle::random_matrix(6, 3, rng);
    std::vector<int> y{2, 1, 0, 2, 1, 1};
    LogRegParams p;
    p.epochs = 0;
    auto r = train_logreg(x, y, 3, p);
    for (double v : r.model.w.values()) CHECK(v == 0.0);
    for (double v : r.model.b) CHECK(v == 0.0);
    CHECK(r.loss_trace.size() == 1);
    CHECK(r.loss_trace[0] == doctest::Approx(std::log(3.0)));
    for (int c : predict_logreg(r.model, x)) CHECK(c == 0);
  }

  TEST_CASE("single labeled point is fitted confidently") {
    Matrix x(1, 4);
    x(0, 0) = 0.5;
    x(0, 1) = -1.0;
    x(0, 3) = 2.0;
    std::vector<int> y{2};
    LogRegParams p;
    p.epochs = 200;
    p.lr = 0.5;
    auto r = train_logreg(x, y, 3, p);
    auto prob = softmax_row(logreg_logits(r.model, x).row(0));
    CHECK(prob[2] > 0.9);
  }

  TEST_CASE("gradient matches central finite differences") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
      auto x = oracle::random_matrix(9, 5, rng);
      std::vector<int> y;
      for (int i = 0; i < 9; ++i) y.push_back(static_cast<int>(rng.below(4)));
      LogRegModel m{oracle::random_matrix(5, 4, rng, 0.5), {}};
      for (int c = 0; c < 4; ++c) m.b.push_back(rng.normal());
      const double l2 = t % 2 ? 1e-2 : 0.0;
      auto g = logreg_gradient(m, x, y, l2);
      auto f = [&] { return logreg_loss(m, x, y, l2); };
      auto nw = oracle::central_difference(m.w, f, 1e-5);
      Matrix bias(1, 4);
      for (int c = 0; c < 4; ++c) bias(0, c) = m.b[c];
      auto fb = [&] {
        for (int c = 0; c < 4; ++c) m.b[c] = bias(0, c);
        return logreg_loss(m, x, y, l2);
      };
      auto nb = oracle::central_difference(bias, fb, 1e-5);
      Matrix gb(1, 4);
      for (int c = 0; c < 4; ++c) gb(0, c) = g.b[c];
      CHECK(oracle::compare_gradients(g.w, nw, 1e-4, 1e-8, 1e-4).failures == 0);
      CHECK(oracle::compare_gradients(gb, nb, 1e-4, 1e-8, 1e-4).failures == 0);
    }
  }

  TEST_CASE("shift invariance of predictions") {
    Rng rng(3);
    auto x = oracle::random_matrix(20, 3, rng);
    LogRegModel m{oracle::random_matrix(3, 4, rng), {0.1, -0.2, 0.3, 0.0}};
    auto before = predict_logreg(m, x);
    for (double& b : m.b) b += 17.0;
    CHECK(predict_logreg(m, x) == before);
  }

  TEST_CASE("separable two-class blobs are fitted perfectly") {
    auto ds = synth_blobs({100, 4, 2, 8.0, 5});
    auto r = train_logreg(ds.x, ds.truth, 2, LogRegParams{});
    CHECK(predict_logreg(r.model, ds.x) == ds.truth);
  }

  TEST_CASE("loss is non-increasing at a small learning rate") {
    auto ds = synth_blobs({60, 5, 3, 3.0, 2});
    LogRegParams p;
    p.lr = 0.05;
    p.epochs = 300;
    auto r = train_logreg(ds.x, ds.truth, 3, p);
    for (std::size_t e = 1; e < r.loss_trace.size(); ++e) CHECK(r.loss_trace[e] <= r.loss_trace[e - 1] + 1e-9);
  }

  TEST_CASE("training never reads unlabeled rows") {
    auto ds = synth_blobs({50, 4, 3, 3.0, 9});
    auto split = make_split(ds, 9, 4);
    std::vector<int> y;
    for (auto i : split.labeled) y.push_back(ds.truth[i]);
    auto clean = train_logreg(select_rows(ds.x, split.labeled), y, 3, LogRegParams{});

    Matrix garbage = ds.x;
    for (auto i : split.unlabeled)
      for (double& v : garbage.row(i)) v = 1e6 * static_cast<double>(i);
    auto dirty = train_logreg(select_rows(garbage, split.labeled), y, 3, LogRegParams{});
    CHECK(dirty.model.w == clean.model.w);
    CHECK(dirty.model.b == clean.model.b);
  }

  TEST_CASE("errors") {
    Matrix x(2, 2);
    std::vector<int> y{0, 5};
    CHECK_THROWS_AS(train_logreg(x, y, 3, LogRegParams{}), ValidationError);
    CHECK_THROWS_AS(train_logreg(Matrix(0, 2), std::vector<int>{}, 3, LogRegParams{}), ValidationError);
    LogRegModel m{Matrix(3, 2), {0, 0}};
    CHECK_THROWS_AS(predict_logreg(m, x), ValidationError);
    Matrix huge(1, 1, 1e200);
    LogRegParams p;
    p.lr = 1e300;
    p.epochs = 5;
    CHECK_THROWS_AS(train_logreg(huge, std::vector<int>{1}, 2, p), DivergenceError);
  }
}
