#include "textgcn/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "textgcn/error.hpp"
#include "textgcn/text.hpp"

namespace textgcn {

namespace {

constexpr const char* kMagic = "textgcn-checkpoint";
constexpr int kVersion = 1;

void write_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "\t" : "") << format_double17(r[j]);
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::vector<std::string> line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file");
    ++line_no_;
    strip_cr(text);
    return split_fields(text, text.find('\t') != std::string::npos ? '\t' : ' ');
  }

  std::string value(const char* key) {
    auto f = line();
    if (f.size() != 2 || f[0] != key) fail(std::string("expected '") + key + " <value>'");
    return f[1];
  }

  double real(const char* key) {
    auto v = parse_double(value(key));
    if (!v) fail(std::string("bad number for ") + key);
    return *v;
  }

  std::size_t count(const char* key) {
    auto v = parse_index(value(key));
    if (!v) fail(std::string("bad integer for ") + key);
    return *v;
  }

  Matrix matrix(const char* name) {
    auto h = line();
    if (h.size() != 4 || h[0] != "matrix" || h[1] != name) fail(std::string("expected 'matrix ") + name + " <rows> <cols>'");
    auto rows = parse_index(h[2]);
    auto cols = parse_index(h[3]);
    if (!rows || !cols) fail("bad matrix shape");
    Matrix m(*rows, *cols);
    for (std::size_t i = 0; i < *rows; ++i) {
      auto f = split_line();
      if (f.size() != *cols) fail("matrix row has " + std::to_string(f.size()) + " values, expected " + std::to_string(*cols));
      for (std::size_t j = 0; j < *cols; ++j) {
        auto v = parse_double(f[j]);
        if (!v) fail("bad matrix value '" + f[j] + "'");
        m(i, j) = *v;
      }
    }
    return m;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("checkpoint line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::vector<std::string> split_line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file");
    ++line_no_;
    strip_cr(text);
    return split_fields(text, '\t');
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << kMagic << ' ' << kVersion << '\n';
  if (const auto* g = std::get_if<GcnCheckpoint>(&ckpt)) {
    out << "type gcn\n";
    out << "normalize_features " << (g->normalize_features ? 1 : 0) << '\n';
    out << "seed " << g->hp.seed << '\n';
    out << "lr " << format_double17(g->hp.lr) << '\n';
    out << "epochs " << g->hp.epochs << '\n';
    out << "hidden " << g->hp.hidden << '\n';
    out << "weight_decay " << format_double17(g->hp.weight_decay) << '\n';
    write_matrix(out, "theta1", g->model.theta1);
    write_matrix(out, "theta2", g->model.theta2);
  } else {
    const auto& l = std::get<LogRegCheckpoint>(ckpt);
    out << "type logreg\n";
    out << "normalize_features " << (l.normalize_features ? 1 : 0) << '\n';
    out << "lr " << format_double17(l.params.lr) << '\n';
    out << "epochs " << l.params.epochs << '\n';
    out << "l2 " << format_double17(l.params.l2) << '\n';
    write_matrix(out, "w", l.model.w);
    Matrix b(1, l.model.b.size());
    std::ranges::copy(l.model.b, b.values().begin());
    write_matrix(out, "b", b);
  }
  out << "end\n";
}

Checkpoint parse_checkpoint(std::istream& in) {
  Reader r(in);
  auto magic = r.line();
  if (magic.size() != 2 || magic[0] != kMagic) r.fail("not a textgcn checkpoint");
  if (magic[1] != std::to_string(kVersion)) r.fail("unsupported checkpoint version " + magic[1]);
  const std::string type = r.value("type");
  const auto normalize = r.count("normalize_features");
  if (normalize > 1) r.fail("normalize_features must be 0 or 1");

  Checkpoint result;
  if (type == "gcn") {
    GcnCheckpoint g;
    g.normalize_features = normalize == 1;
    g.hp.seed = r.count("seed");
    g.hp.lr = r.real("lr");
    g.hp.epochs = r.count("epochs");
    g.hp.hidden = r.count("hidden");
    g.hp.weight_decay = r.real("weight_decay");
    g.model.theta1 = r.matrix("theta1");
    g.model.theta2 = r.matrix("theta2");
    if (g.model.theta1.cols() != g.model.theta2.rows()) r.fail("theta1 and theta2 disagree on hidden width");
    result = std::move(g);
  } else if (type == "logreg") {
    LogRegCheckpoint l;
    l.normalize_features = normalize == 1;
    l.params.lr = r.real("lr");
    l.params.epochs = r.count("epochs");
    l.params.l2 = r.real("l2");
    l.model.w = r.matrix("w");
    Matrix b = r.matrix("b");
    if (b.rows() != 1 || b.cols() != l.model.w.cols()) r.fail("bias shape does not match weights");
    l.model.b.assign(b.values().begin(), b.values().end());
    result = std::move(l);
  } else {
    r.fail("unknown checkpoint type '" + type + "'");
  }
  auto tail = r.line();
  if (tail.size() != 1 || tail[0] != "end") r.fail("expected 'end'");
  return result;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return parse_checkpoint(in);
}

}  // namespace textgcn
