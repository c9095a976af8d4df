#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textgcn {

struct ResultRow {
  std::string model;
  std::size_t budget = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double accuracy_pct = 0.0;
  double wall_ms = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct AggregateRow {
  std::string model;
  std::size_t budget = 0;
  double mean_pct = 0.0;
  double std_pct = 0.0;  // sample standard deviation; 0 for a single repeat
  std::size_t repeats = 0;

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

struct EvalReport {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Groups rows by (model, budget) in order of first appearance.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

enum class ReportFormat { csv, markdown };

/// csv: the per-repeat block (`model,budget,repeat,seed,accuracy_pct,wall_ms`),
/// a blank line, then the aggregate block (`model,budget,mean_pct,std_pct,repeats`).
/// Reals use the shortest exact decimal form.
///
/// markdown: one table with a row per model and a column per budget, each
/// cell the mean accuracy to two decimals.
std::string render_report(const EvalReport& report, ReportFormat format);

EvalReport parse_report_csv(std::string_view text);

}  // namespace textgcn
