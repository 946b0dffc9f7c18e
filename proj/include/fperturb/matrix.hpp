#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fperturb {

using Vector = std::vector<double>;

/// Dense real matrix stored column-major, so that `data()` is exactly vec(A).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  /// Builds a matrix from nested row lists; all rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix from_column_major(std::size_t rows, std::size_t cols, Vector entries);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> column(std::size_t j) const {
    return std::span<const double>(data_).subspan(j * rows_, rows_);
  }

  Matrix transposed() const;
  /// Leading k x k principal block.
  Matrix leading_block(std::size_t k) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Column stacking; identical to the storage order.
Vector vec(const Matrix& a);
Matrix unvec(std::span<const double> x, std::size_t rows, std::size_t cols);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix abs(const Matrix& a);
/// Entrywise a <= b.
bool entrywise_leq(const Matrix& a, const Matrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace fperturb
