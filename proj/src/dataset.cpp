#include "textgcn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "textgcn/error.hpp"
#include "textgcn/rng.hpp"
#include "textgcn/text.hpp"

namespace textgcn {

bool EmbeddingDataset::fully_labeled() const {
  return has_truth() && std::ranges::none_of(truth, [](int c) { return c == kNoLabel; });
}

void EmbeddingDataset::validate() const {
  if (size() < 1 || dim() < 1) throw ValidationError("dataset needs at least one row and one column");
  if (num_classes < 2) throw ValidationError("dataset needs at least two classes");
  if (ids.size() != size()) throw ValidationError("dataset ids and rows differ in length");
  if (has_truth() && truth.size() != size())
    throw ValidationError("dataset labels and rows differ in length");
  for (int c : truth)
    if (c != kNoLabel && (c < 0 || c >= num_classes))
      throw ValidationError("class index " + std::to_string(c) + " outside [0, " +
                            std::to_string(num_classes) + ")");
  if (!x.all_finite()) throw ValidationError("dataset contains non-finite embedding values");
  if (!class_names.empty() && class_names.size() != static_cast<std::size_t>(num_classes))
    throw ValidationError("class name dictionary does not match class count");
}

namespace {

std::string where(std::size_t data_row, std::size_t line) {
  return "data row " + std::to_string(data_row) + " (line " + std::to_string(line) + ")";
}

std::optional<int> parse_class(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

EmbeddingDataset parse_dataset(std::istream& in) {
  std::optional<int> declared_classes;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "#classes=";
      if (line.starts_with(key)) {
        auto c = parse_class(std::string_view(line).substr(key.size()));
        if (!c || *c < 2) throw FormatError("line " + std::to_string(line_no) + ": bad #classes value");
        declared_classes = *c;
      }
      continue;
    }
    header = split_fields(line, ',');
    break;
  }
  if (header.empty() || header.front() != "id") throw FormatError("missing header line starting with 'id'");
  const bool has_label = header.size() > 1 && header[1] == "label";
  const std::size_t first_value = has_label ? 2 : 1;
  if (header.size() <= first_value) throw FormatError("header declares no embedding columns");
  const std::size_t width = header.size() - first_value;

  EmbeddingDataset ds;
  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::vector<std::size_t> label_lines;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    ++data_row;
    auto fields = split_fields(line, ',');
    if (fields.size() != header.size())
      throw FormatError(where(data_row, line_no) + ": expected " + std::to_string(width) +
                        " embedding values, found " +
                        std::to_string(fields.size() < first_value ? 0 : fields.size() - first_value));
    if (fields[0].empty()) throw FormatError(where(data_row, line_no) + ": empty id");
    ds.ids.push_back(fields[0]);
    if (has_label) {
      raw_labels.push_back(fields[1]);
      label_lines.push_back(line_no);
    }
    for (std::size_t j = first_value; j < fields.size(); ++j) {
      auto v = parse_double(fields[j]);
      if (!v || !std::isfinite(*v))
        throw FormatError(where(data_row, line_no) + ": non-numeric embedding cell '" + fields[j] + "'");
      values.push_back(*v);
    }
  }
  if (data_row == 0) throw FormatError("no data rows");

  ds.x = Matrix(data_row, width);
  std::ranges::copy(values, ds.x.values().begin());

  if (has_label) {
    bool integer_labels = true;
    for (const auto& s : raw_labels)
      if (!s.empty() && !parse_class(s)) integer_labels = false;

    ds.truth.assign(data_row, kNoLabel);
    if (integer_labels) {
      int max_class = -1;
      for (std::size_t r = 0; r < raw_labels.size(); ++r) {
        if (raw_labels[r].empty()) continue;
        int c = *parse_class(raw_labels[r]);
        if (c < 0) throw FormatError(where(r + 1, label_lines[r]) + ": negative class index");
        if (declared_classes && c >= *declared_classes)
          throw FormatError(where(r + 1, label_lines[r]) + ": class index " + std::to_string(c) +
                            " >= declared class count " + std::to_string(*declared_classes));
        ds.truth[r] = c;
        max_class = std::max(max_class, c);
      }
      ds.num_classes = declared_classes.value_or(std::max(2, max_class + 1));
    } else {
      std::map<std::string, int> dictionary;
      for (const auto& s : raw_labels)
        if (!s.empty()) dictionary.emplace(s, 0);
      int next = 0;
      for (auto& [name, index] : dictionary) {
        index = next++;
        ds.class_names.push_back(name);
      }
      if (declared_classes && *declared_classes != next)
        throw FormatError("#classes=" + std::to_string(*declared_classes) + " but found " +
                          std::to_string(next) + " distinct string labels");
      for (std::size_t r = 0; r < raw_labels.size(); ++r)
        if (!raw_labels[r].empty()) ds.truth[r] = dictionary.at(raw_labels[r]);
      ds.num_classes = next;
      if (ds.num_classes < 2) throw FormatError("string labels name fewer than two classes");
    }
  } else {
    ds.num_classes = declared_classes.value_or(2);
  }
  ds.validate();
  return ds;
}

EmbeddingDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file " + path.string());
  return parse_dataset(in);
}

void write_dataset(std::ostream& out, const EmbeddingDataset& ds) {
  ds.validate();
  out << "#classes=" << ds.num_classes << '\n';
  out << "id";
  if (ds.has_truth()) out << ",label";
  for (std::size_t j = 0; j < ds.dim(); ++j) out << ",e" << j;
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.ids[i];
    if (ds.has_truth()) {
      out << ',';
      if (int c = ds.truth[i]; c != kNoLabel) {
        if (ds.class_names.empty())
          out << c;
        else
          out << ds.class_names[static_cast<std::size_t>(c)];
      }
    }
    for (double v : ds.x.row(i)) out << ',' << format_double17(v);
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const EmbeddingDataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file " + path.string());
  write_dataset(out, ds);
}

EmbeddingDataset synth_blobs(const BlobSpec& spec) {
  if (spec.classes < 2) throw ValidationError("synth_blobs: need at least two classes");
  if (spec.dim < 1) throw ValidationError("synth_blobs: dimension must be positive");
  if (spec.n < static_cast<std::size_t>(spec.classes))
    throw ValidationError("synth_blobs: n must be at least the class count");
  if (!(spec.separation >= 0.0)) throw ValidationError("synth_blobs: separation must be >= 0");

  const auto classes = static_cast<std::size_t>(spec.classes);
  Matrix centers(classes, spec.dim);
  if (spec.dim >= classes) {
    for (std::size_t c = 0; c < classes; ++c) centers(c, c) = spec.separation / std::sqrt(2.0);
  } else {
    for (std::size_t c = 0; c < classes; ++c) centers(c, 0) = spec.separation * static_cast<double>(c);
  }

  Rng rng(spec.seed);
  EmbeddingDataset ds;
  ds.num_classes = spec.classes;
  ds.x = Matrix(spec.n, spec.dim);
  ds.truth.resize(spec.n);
  ds.ids.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t c = i % classes;
    ds.truth[i] = static_cast<int>(c);
    ds.ids.push_back("blob-" + std::to_string(i));
    for (std::size_t j = 0; j < spec.dim; ++j) ds.x(i, j) = centers(c, j) + rng.normal();
  }
  return ds;
}

Matrix l2_normalize_rows(const Matrix& x) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    double norm = 0.0;
    for (double v : r) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& v : r) v /= norm;
  }
  return out;
}

LabeledSplit make_split(const EmbeddingDataset& ds, std::size_t labeled_count, std::uint64_t seed,
                        bool stratified) {
  const std::size_t n = ds.size();
  if (labeled_count < 1) throw ValidationError("make_split: need at least one labeled node");
  if (labeled_count > n) throw ValidationError("make_split: more labeled nodes requested than exist");

  Rng rng(seed);
  std::vector<std::size_t> labeled;
  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    labeled.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(labeled_count));
  } else {
    if (!ds.fully_labeled()) throw ValidationError("make_split: stratified split needs ground truth for every row");
    const auto classes = static_cast<std::size_t>(ds.num_classes);
    if (labeled_count < classes)
      throw ValidationError("make_split: stratified split needs at least one labeled node per class");
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(ds.truth[i])].push_back(i);

    std::vector<std::size_t> quota(classes, labeled_count / classes);
    std::vector<std::size_t> class_order(classes);
    std::iota(class_order.begin(), class_order.end(), std::size_t{0});
    rng.shuffle(std::span(class_order));
    for (std::size_t k = 0; k < labeled_count % classes; ++k) ++quota[class_order[k]];

    for (std::size_t c = 0; c < classes; ++c) {
      if (members[c].size() < quota[c])
        throw ValidationError("make_split: class " + std::to_string(c) + " has only " +
                              std::to_string(members[c].size()) + " members, needs " +
                              std::to_string(quota[c]));
      rng.shuffle(std::span(members[c]));
      labeled.insert(labeled.end(), members[c].begin(),
                     members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
  }

  std::ranges::sort(labeled);
  LabeledSplit split;
  split.labeled = std::move(labeled);
  split.unlabeled.reserve(n - labeled_count);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (next < split.labeled.size() && split.labeled[next] == i)
      ++next;
    else
      split.unlabeled.push_back(i);
  }
  return split;
}

void write_split(std::ostream& out, const LabeledSplit& split) {
  out << "#nodes=" << split.labeled.size() + split.unlabeled.size() << '\n';
  for (auto i : split.labeled) out << i << '\n';
}

LabeledSplit parse_split(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> nodes;
  std::vector<std::size_t> labeled;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (line.starts_with("#nodes=")) {
      nodes = parse_index(std::string_view(line).substr(7));
      if (!nodes) throw FormatError("line " + std::to_string(line_no) + ": bad #nodes value");
      continue;
    }
    auto idx = parse_index(line);
    if (!idx) throw FormatError("line " + std::to_string(line_no) + ": expected a node index");
    labeled.push_back(*idx);
  }
  if (!nodes) throw FormatError("split file lacks a #nodes= line");
  std::ranges::sort(labeled);
  if (std::ranges::adjacent_find(labeled) != labeled.end()) throw FormatError("split file repeats a node");
  if (labeled.empty()) throw FormatError("split file lists no labeled nodes");
  if (labeled.back() >= *nodes) throw FormatError("split file index exceeds #nodes");

  LabeledSplit split;
  split.labeled = labeled;
  std::size_t next = 0;
  for (std::size_t i = 0; i < *nodes; ++i) {
    if (next < labeled.size() && labeled[next] == i)
      ++next;
    else
      split.unlabeled.push_back(i);
  }
  return split;
}

LabelMatrix build_label_matrix(const EmbeddingDataset& ds, const LabeledSplit& split) {
  LabelMatrix out{Matrix(ds.size(), static_cast<std::size_t>(ds.num_classes))};
  for (auto i : split.labeled) {
    if (i >= ds.size()) throw ValidationError("build_label_matrix: labeled index out of range");
    if (!ds.has_truth() || ds.truth[i] == kNoLabel)
      throw ValidationError("build_label_matrix: labeled node " + std::to_string(i) + " has no ground truth");
    out.y(i, static_cast<std::size_t>(ds.truth[i])) = 1.0;
  }
  return out;
}

}  // namespace textgcn
