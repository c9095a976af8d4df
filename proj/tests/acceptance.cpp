// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_support.hpp"
#include "textgcn/checkpoint.hpp"
#include "textgcn/cli.hpp"
#include "textgcn/experiment.hpp"
#include "textgcn/metrics.hpp"

using namespace textgcn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Instance {
  PropagationMatrix s;
  Matrix x;
  GcnModel model;
  LabelMatrix y;
  std::vector<std::size_t> labeled;
};

Instance random_instance(std::uint64_t seed, std::size_t n, std::size_t labeled_count) {
  Rng rng(seed);
  Instance in;
  in.s = normalize(oracle::random_knn_style_graph(n, std::min<std::size_t>(5, n - 1), rng));
  in.x = oracle::random_matrix(n, 7, rng);
  in.model = init_model(7, 5, 3, mix64(seed));
  std::vector<std::size_t> nodes(n);
  std::iota(nodes.begin(), nodes.end(), std::size_t{0});
  rng.shuffle(std::span(nodes));
  in.labeled.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(labeled_count));
  std::ranges::sort(in.labeled);
  in.y = oracle::random_labels(n, 3, in.labeled, rng);
  return in;
}

Outcome gradient_correctness() {
  std::size_t failures = 0, entries = 0;
  double worst = 0.0;
  const int instances = 25;
  for (int t = 0; t < instances; ++t) {
    auto in = random_instance(1000 + t, 12, 4);
    auto cache = forward(in.model, in.s, in.x);
    auto g = backward(in.model, in.s, in.x, cache, in.y, in.labeled);
    auto f = [&] { return loss(forward(in.model, in.s, in.x), in.y, in.labeled); };
    for (auto [analytic, theta] : {std::pair{&g.theta1, &in.model.theta1}, std::pair{&g.theta2, &in.model.theta2}}) {
      auto numeric = oracle::central_difference(*theta, f, 1e-5);
      auto r = oracle::compare_gradients(*analytic, numeric, 1e-4, 1e-8, 1e-4);
      failures += r.failures;
      worst = std::max(worst, r.worst_rel);
      entries += analytic->values().size();
    }
  }
  return {failures == 0, std::to_string(instances) + " instances, " + std::to_string(entries) +
                             " entries, worst rel err " + fmt("%.2e", worst) + ", failures " + std::to_string(failures)};
}

Outcome forward_oracle() {
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 5 + 5 * static_cast<std::size_t>(t);
    auto in = random_instance(2000 + t, n, 4);
    auto z = forward(in.model, in.s, in.x).z;
    auto dense = oracle::dense_forward(oracle::dense_propagation(n, oracle::edge_set([&] {
                                         std::vector<Edge> e;
                                         for (std::size_t i = 0; i < n; ++i)
                                           for (std::size_t p = in.s.row_ptr()[i]; p < in.s.row_ptr()[i + 1]; ++p)
                                             if (in.s.col_idx()[p] > i) e.emplace_back(i, in.s.col_idx()[p]);
                                         return SparseAdjacency(n, e);
                                       }())),
                                       in.x, in.model.theta1, in.model.theta2);
    worst = std::max(worst, max_abs_diff(z, dense));
  }
  return {worst <= 1e-12, "10 instances (n = 5..50), max abs diff " + fmt("%.2e", worst)};
}

Outcome knn_oracle() {
  std::size_t cases = 0, mismatches = 0;
  Rng rng(3000);
  for (std::size_t n : {50u, 200u})
    for (std::size_t d : {2u, 16u})
      for (bool duplicates : {false, true}) {
        auto x = oracle::random_matrix(n, d, rng);
        if (duplicates) {
          // Copy a handful of rows onto others so exact distance ties appear.
          for (std::size_t r = 0; r < n / 10; ++r) {
            auto src = rng.below(n), dst = rng.below(n);
            for (std::size_t j = 0; j < d; ++j) x(dst, j) = x(src, j);
          }
        }
        for (std::size_t k : {1u, 5u, 10u}) {
          ++cases;
          if (oracle::edge_set(knn_graph(x, k)) != oracle::brute_force_knn(x, k)) ++mismatches;
        }
      }
  return {mismatches == 0, std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches"};
}

Outcome normalization_identity() {
  double worst = 0.0;
  bool symmetric = true, diagonal = true;
  Rng rng(4000);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 10 + 9 * static_cast<std::size_t>(t);
    auto g = oracle::random_knn_style_graph(n, 1 + static_cast<std::size_t>(t) % 6, rng);
    auto s = normalize(g);
    auto dense = s.to_dense();
    worst = std::max(worst, max_abs_diff(dense, oracle::dense_propagation(n, oracle::edge_set(g))));
    auto deg = g.degrees();
    for (std::size_t i = 0; i < n; ++i) {
      diagonal &= dense(i, i) == 1.0 / static_cast<double>(deg[i] + 1);
      for (std::size_t j = 0; j < n; ++j) symmetric &= std::abs(dense(i, j) - dense(j, i)) <= 1e-12;
    }
  }
  return {worst <= 1e-12 && symmetric && diagonal, "max abs diff " + fmt("%.2e", worst) +
                                                       (symmetric ? ", symmetric" : ", NOT symmetric") +
                                                       (diagonal ? ", diag = 1/deg" : ", diag wrong")};
}

Outcome loss_closed_forms() {
  double worst = 0.0;
  bool empty_ok = true;
  for (int t = 0; t < 10; ++t) {
    const std::size_t l = 1 + static_cast<std::size_t>(t);
    auto in = random_instance(5000 + t, 12, l);
    in.model.theta2 = Matrix(5, 3);
    auto cache = forward(in.model, in.s, in.x);
    worst = std::max(worst, std::abs(loss(cache, in.y, in.labeled) - static_cast<double>(l) * std::log(3.0)));

    auto fresh = random_instance(5100 + t, 12, l);
    auto c2 = forward(fresh.model, fresh.s, fresh.x);
    empty_ok &= loss(c2, fresh.y, {}) == 0.0;
    auto g = backward(fresh.model, fresh.s, fresh.x, c2, fresh.y, {});
    for (double v : g.theta1.values()) empty_ok &= v == 0.0;
    for (double v : g.theta2.values()) empty_ok &= v == 0.0;
  }
  return {worst <= 1e-12 && empty_ok,
          "|L - l ln C| max " + fmt("%.2e", worst) + (empty_ok ? ", empty set: L = 0, grads = 0" : ", empty set FAILED")};
}

Outcome training_sanity() {
  auto ds = synth_blobs({300, 8, 3, 6.0, 0});
  auto s = normalize(knn_graph(ds.x, 5));
  auto split = make_split(ds, 9, 0, true);
  Hyperparams hp;
  hp.lr = 0.2;
  hp.epochs = 200;
  hp.hidden = 16;
  auto r = train(init_model(8, 16, 3, 0), s, ds.x, build_label_matrix(ds, split), split.labeled, hp);
  double worst_rise = 0.0;
  for (std::size_t e = 1; e < r.loss_trace.size(); ++e)
    worst_rise = std::max(worst_rise, r.loss_trace[e] - r.loss_trace[e - 1]);
  auto pred = predict(forward(r.model, s, ds.x));
  std::vector<int> p, t;
  for (auto i : split.unlabeled) {
    p.push_back(pred[i]);
    t.push_back(ds.truth[i]);
  }
  const double acc = accuracy(p, t);
  return {worst_rise <= 1e-9 && acc >= 95.0, "loss " + fmt("%.4g", r.loss_trace.front()) + " -> " +
                                                 fmt("%.4g", r.loss_trace.back()) + ", largest step rise " +
                                                 fmt("%.2e", worst_rise) + ", unlabeled accuracy " + fmt("%.2f%%", acc)};
}

ExperimentConfig sweep_config() {
  ExperimentConfig cfg;
  cfg.synth = BlobSpec{300, 8, 3, 6.0, 0};
  cfg.models = {"gcn", "logreg"};
  cfg.budgets = {9, 30};
  cfg.repeats = 10;
  cfg.seed = 0;
  return cfg;
}

Outcome directional_reproduction() {
  auto report = run_experiment(sweep_config());
  auto mean = [&](const std::string& m, std::size_t l) {
    for (const auto& a : report.aggregates)
      if (a.model == m && a.budget == l) return a.mean_pct;
    return std::nan("");
  };
  const double g9 = mean("gcn", 9), r9 = mean("logreg", 9), g30 = mean("gcn", 30), r30 = mean("logreg", 30);
  const double gap9 = g9 - r9, gap30 = g30 - r30;
  return {g9 > r9 && gap30 < gap9, "l=9: gcn " + fmt("%.2f", g9) + " vs logreg " + fmt("%.2f", r9) + "; l=30: gcn " +
                                       fmt("%.2f", g30) + " vs logreg " + fmt("%.2f", r30) + "; gap " +
                                       fmt("%+.2f", gap9) + " -> " + fmt("%+.2f", gap30)};
}

Outcome metric_identity() {
  Rng rng(8000);
  std::size_t mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<int> p(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.below(2));
      y[i] = static_cast<int>(rng.below(2));
    }
    if (accuracy_from_counts(confusion_counts(p, y, 1)) != accuracy(p, y)) ++mismatches;
  }
  const std::string worked = fmt("%.2f", accuracy_from_counts({3, 1, 2, 0}));
  return {mismatches == 0 && worked == "83.33",
          "100 vectors, " + std::to_string(mismatches) + " mismatches; tp=3 tn=2 fp=1 fn=0 -> " + worked + "%"};
}

Outcome determinism() {
  TempDir dir;
  spit(dir / "cfg.json", config_to_json(sweep_config()));
  std::ostringstream sink;
  const std::string cfg = (dir / "cfg.json").string();
  int a = run_cli({"experiment", "--config", cfg, "--out", (dir / "a.csv").string()}, sink, sink);
  int b = run_cli({"experiment", "--config", cfg, "--out", (dir / "b.csv").string()}, sink, sink);
  const std::string first = slurp(dir / "a.csv"), second = slurp(dir / "b.csv");
  const bool same = a == 0 && b == 0 && !first.empty() && first == second;
  return {same, "two CLI runs, " + std::to_string(first.size()) + " bytes, " + (same ? "identical" : "DIFFERENT")};
}

Outcome format_round_trips() {
  std::vector<std::string> broken;
  auto check = [&](const std::string& name, const std::string& first, const std::function<std::string(const std::string&)>& again) {
    if (again(first) != first) broken.push_back(name);
  };

  auto ds = synth_blobs({40, 6, 4, 3.0, 1});
  ds.truth[3] = kNoLabel;
  auto write_ds = [](const EmbeddingDataset& d) {
    std::ostringstream o;
    write_dataset(o, d);
    return o.str();
  };
  check("embedding csv", write_ds(ds), [&](const std::string& text) {
    std::istringstream in(text);
    return write_ds(parse_dataset(in));
  });

  auto write_g = [](const SparseAdjacency& g) {
    std::ostringstream o;
    write_graph(o, g);
    return o.str();
  };
  auto g = knn_graph(ds.x, 5);
  check("edge list", write_g(g), [&](const std::string& text) {
    std::istringstream in(text);
    return write_g(parse_graph(in));
  });
  check("edge list with isolated nodes", write_g(SparseAdjacency(6, {{1, 4}})), [&](const std::string& text) {
    std::istringstream in(text);
    return write_g(parse_graph(in));
  });

  auto write_c = [](const Checkpoint& c) {
    std::ostringstream o;
    write_checkpoint(o, c);
    return o.str();
  };
  auto reparse_c = [&](const std::string& text) {
    std::istringstream in(text);
    return write_c(parse_checkpoint(in));
  };
  check("gcn checkpoint", write_c(GcnCheckpoint{init_model(6, 16, 4, 9), {}, false}), reparse_c);
  std::vector<int> y(ds.truth.begin(), ds.truth.begin() + 3);
  auto lr = train_logreg(select_rows(ds.x, std::vector<std::size_t>{0, 1, 2}), y, 4, LogRegParams{});
  check("logreg checkpoint", write_c(LogRegCheckpoint{lr.model, {}, true}), reparse_c);

  auto cfg = sweep_config();
  cfg.repeats = 2;
  cfg.gcn.epochs = 20;
  cfg.record_wall_time = true;
  check("report csv", render_report(run_experiment(cfg), ReportFormat::csv),
        [](const std::string& text) { return render_report(parse_report_csv(text), ReportFormat::csv); });

  std::string detail = "embedding csv, edge list, checkpoints, report csv";
  if (!broken.empty()) {
    detail = "changed on rewrite:";
    for (const auto& b : broken) detail += " " + b + ";";
  }
  return {broken.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1 gradient correctness", 10, gradient_correctness},
      {"AC2 forward-pass oracle equivalence", 0, forward_oracle},
      {"AC3 k-NN graph oracle equivalence", 10, knn_oracle},
      {"AC4 normalization identity", 0, normalization_identity},
      {"AC5 loss closed forms", 0, loss_closed_forms},
      {"AC6 training sanity", 30, training_sanity},
      {"AC7 directional low-label reproduction", 120, directional_reproduction},
      {"AC8 metric identity", 0, metric_identity},
      {"AC9 determinism", 0, determinism},
      {"AC10 format round trips", 0, format_round_trips},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += "; exceeded " + fmt("%.0f s", c.time_limit_s);
    }
    std::printf("[%s] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
