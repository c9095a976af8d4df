#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace textgcn {

/// Dense row-major matrix of doubles.
///
/// All products accumulate in ascending index order so results are
/// reproducible bit-for-bit across runs and thread counts.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * transpose(b)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// Largest absolute elementwise difference; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Sum of squared entries.
double squared_norm(const Matrix& a);

/// Gathers the listed rows, in order.
Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows);

/// Index of the largest entry of each row; ties go to the lowest column.
std::vector<int> argmax_rows(const Matrix& a);

}  // namespace textgcn
