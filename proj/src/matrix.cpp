#include "textgcn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "textgcn/error.hpp"

namespace textgcn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: row counts differ");
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto src = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(k, i);
      if (s == 0.0) continue;
      auto dst = out.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: column counts differ");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto lhs = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto rhs = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < lhs.size(); ++k) acc += lhs[k] * rhs[k];
      out(i, j) = acc;
    }
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

double squared_norm(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  return acc;
}

Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r] < a.rows(), "select_rows: index out of range");
    std::ranges::copy(a.row(rows[r]), out.row(r).begin());
  }
  return out;
}

std::vector<int> argmax_rows(const Matrix& a) {
  std::vector<int> out(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r.size(); ++j)
      if (r[j] > r[best]) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace textgcn
