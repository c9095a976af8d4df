#include "textgcn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "textgcn/error.hpp"
#include "textgcn/text.hpp"

namespace textgcn {

namespace {

constexpr std::string_view kRowHeader = "model,budget,repeat,seed,accuracy_pct,wall_ms";
constexpr std::string_view kAggregateHeader = "model,budget,mean_pct,std_pct,repeats";

std::string display_name(const std::string& model) {
  if (model == "gcn") return "Graph Convolutional Network";
  if (model == "logreg") return "Logistic Regression";
  return model;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.model, r.budget);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r.accuracy_pct);
  }
  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    const auto& values = groups.at(key);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    out.push_back({key.first, key.second, mean, sd, values.size()});
  }
  return out;
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  if (report.rows.empty() && report.aggregates.empty()) throw ValidationError("cannot render an empty report");
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kRowHeader << '\n';
    for (const auto& r : report.rows)
      out << r.model << ',' << r.budget << ',' << r.repeat << ',' << r.seed << ','
          << format_double_shortest(r.accuracy_pct) << ',' << format_double_shortest(r.wall_ms) << '\n';
    out << '\n' << kAggregateHeader << '\n';
    for (const auto& a : report.aggregates)
      out << a.model << ',' << a.budget << ',' << format_double_shortest(a.mean_pct) << ','
          << format_double_shortest(a.std_pct) << ',' << a.repeats << '\n';
    return out.str();
  }

  std::vector<std::string> models;
  std::vector<std::size_t> budgets;
  for (const auto& a : report.aggregates) {
    if (std::ranges::find(models, a.model) == models.end()) models.push_back(a.model);
    if (std::ranges::find(budgets, a.budget) == budgets.end()) budgets.push_back(a.budget);
  }
  out << "| Number of labeled texts |";
  for (auto b : budgets) out << ' ' << b << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < budgets.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& m : models) {
    out << "| " << display_name(m) << " |";
    for (auto b : budgets) {
      auto it = std::ranges::find_if(report.aggregates, [&](const AggregateRow& a) { return a.model == m && a.budget == b; });
      if (it == report.aggregates.end()) {
        out << " - |";
      } else {
        char cell[32];
        std::snprintf(cell, sizeof cell, "%.2f", it->mean_pct);
        out << ' ' << cell << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

EvalReport parse_report_csv(std::string_view text) {
  EvalReport report;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  enum class Section { none, rows, aggregates } section = Section::none;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("report line " + std::to_string(line_no) + ": " + what);
  };
  auto number = [&](const std::string& s) {
    auto v = parse_double(s);
    if (!v) throw fail("bad number '" + s + "'");
    return *v;
  };
  auto index = [&](const std::string& s) {
    auto v = parse_index(s);
    if (!v) throw fail("bad integer '" + s + "'");
    return *v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line == kRowHeader) {
      section = Section::rows;
      continue;
    }
    if (line == kAggregateHeader) {
      section = Section::aggregates;
      continue;
    }
    auto f = split_fields(line, ',');
    if (section == Section::rows) {
      if (f.size() != 6) throw fail("expected 6 fields");
      report.rows.push_back({f[0], index(f[1]), index(f[2]), index(f[3]), number(f[4]), number(f[5])});
    } else if (section == Section::aggregates) {
      if (f.size() != 5) throw fail("expected 5 fields");
      report.aggregates.push_back({f[0], index(f[1]), number(f[2]), number(f[3]), index(f[4])});
    } else {
      throw fail("data before any header");
    }
  }
  return report;
}

}  // namespace textgcn
