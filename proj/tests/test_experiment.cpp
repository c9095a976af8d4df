#include <doctest.h>

#include "test_support.hpp"
#include "textgcn/error.hpp"
#include "textgcn/experiment.hpp"

using namespace textgcn;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.synth = BlobSpec{90, 4, 3, 4.0, 2};
  cfg.budgets = {10, 20};
  cfg.repeats = 1;
  cfg.gcn.epochs = 30;
  cfg.gcn.lr = 0.05;
  cfg.logreg.epochs = 50;
  return cfg;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("one row per (budget, repeat, model)") {
    auto report = run_experiment(small_config());
    REQUIRE(report.rows.size() == 4);
    CHECK(report.rows[0].model == "gcn");
    CHECK(report.rows[1].model == "logreg");
    CHECK(report.rows[2].budget == 20);
    CHECK(report.rows[0].seed == derive_seed(0, 10, 0));
    CHECK(report.rows[0].seed == report.rows[1].seed);
    for (const auto& r : report.rows) {
      CHECK(r.accuracy_pct >= 0.0);
      CHECK(r.accuracy_pct <= 100.0);
      CHECK(r.wall_ms == 0.0);
    }
    CHECK(report.aggregates.size() == 4);
  }

  TEST_CASE("repeatable and independent of thread count") {
    auto cfg = small_config();
    cfg.repeats = 3;
    auto a = render_report(run_experiment(cfg), ReportFormat::csv);
    auto b = render_report(run_experiment(cfg), ReportFormat::csv);
    cfg.threads = 4;
    auto c = render_report(run_experiment(cfg), ReportFormat::csv);
    CHECK(a == b);
    CHECK(a == c);
  }

  TEST_CASE("aggregates match the raw rows") {
    auto cfg = small_config();
    cfg.repeats = 4;
    auto report = run_experiment(cfg);
    for (const auto& agg : report.aggregates) {
      double sum = 0.0, ss = 0.0;
      std::size_t count = 0;
      for (const auto& r : report.rows)
        if (r.model == agg.model && r.budget == agg.budget) {
          sum += r.accuracy_pct;
          ++count;
        }
      const double mean = sum / static_cast<double>(count);
      for (const auto& r : report.rows)
        if (r.model == agg.model && r.budget == agg.budget) ss += (r.accuracy_pct - mean) * (r.accuracy_pct - mean);
      CHECK(count == agg.repeats);
      CHECK(std::abs(mean - agg.mean_pct) <= 1e-12);
      CHECK(std::abs(std::sqrt(ss / static_cast<double>(count - 1)) - agg.std_pct) <= 1e-12);
    }
  }

  TEST_CASE("invalid experiments") {
    auto cfg = small_config();
    cfg.budgets = {90};
    CHECK_THROWS_AS(run_experiment(cfg), ValidationError);
    cfg.budgets = {2};
    CHECK_THROWS_AS(run_experiment(cfg), ValidationError);
    cfg = small_config();
    cfg.models = {"svm"};
    CHECK_THROWS_AS(run_experiment(cfg), ValidationError);
    cfg = small_config();
    auto ds = synth_blobs(*cfg.synth);
    ds.truth[5] = kNoLabel;
    CHECK_THROWS_AS(run_experiment(cfg, ds), ValidationError);
  }

  TEST_CASE("registry accepts new models") {
    auto cfg = small_config();
    cfg.models = {"majority"};
    auto registry = ModelRegistry::with_defaults();
    registry.add("majority", [](const CellInput& in) { return std::vector<int>(in.dataset.size(), 0); });
    auto report = run_experiment(cfg, synth_blobs(*cfg.synth), registry);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].accuracy_pct == doctest::Approx(100.0 / 3.0).epsilon(0.05));
  }

  TEST_CASE("unlabeled ground truth never reaches the models") {
    auto cfg = small_config();
    cfg.stratified = false;
    auto ds = synth_blobs(*cfg.synth);
    auto split = make_split(ds, 12, 77, false);
    auto scrambled = ds;
    for (auto i : split.unlabeled) scrambled.truth[i] = (ds.truth[i] + 1) % 3;

    const auto s = normalize(build_graph(ds.x, cfg.graph));
    CellInput clean{ds, ds.x, s, split, 77, cfg};
    CellInput dirty{scrambled, scrambled.x, s, split, 77, cfg};
    CHECK(run_gcn(clean) == run_gcn(dirty));
    CHECK(run_logreg(clean) == run_logreg(dirty));

    auto a = run_experiment(cfg, ds);
    auto b = run_experiment(cfg, scrambled);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].seed == b.rows[i].seed);
      CHECK(a.rows[i].accuracy_pct != b.rows[i].accuracy_pct);
    }
  }

  TEST_CASE("config parsing") {
    TempDir dir;
    spit(dir / "cfg.json", R"({"version": 1, "dataset": {"path": "data.csv"}, "budgets": [10, 20],
                               "graph": {"k": 7, "metric": "cosine"}, "gcn": {"hidden": 32}})");
    auto cfg = load_config(dir / "cfg.json");
    CHECK(cfg.dataset_path == dir / "data.csv");
    CHECK(cfg.graph.k == 7);
    CHECK(cfg.graph.metric == Metric::cosine);
    CHECK(cfg.gcn.hidden == 32);
    CHECK(cfg.gcn.lr == 0.2);
    CHECK(cfg.repeats == 10);
    CHECK(cfg.stratified);
    CHECK(cfg.models == std::vector<std::string>{"gcn", "logreg"});

    auto again = parse_config(config_to_json(cfg));
    CHECK(config_to_json(again) == config_to_json(cfg));

    CHECK_THROWS_AS(parse_config(R"({"version": 2, "dataset": {"path": "x"}, "budgets": [1]})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"dataset": {"path": "x"}, "budgets": [1], "bogus": 1})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"dataset": {"path": "x"}})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"dataset": {}, "budgets": [1]})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"dataset": {"path": 3}, "budgets": [1]})"), ValidationError);
    CHECK_THROWS_AS(parse_config("{not json"), FormatError);
  }
}
