#pragma once

#include <cstddef>

#include "fperturb/matrix.hpp"

namespace fperturb {

/// Positive diagonal scaling matrix D = diag(d_1, ..., d_n).
class ScalingMatrix {
 public:
  /// Throws Error unless every entry is finite and strictly positive.
  explicit ScalingMatrix(Vector diagonal);
  static ScalingMatrix identity(std::size_t n);

  const Vector& diagonal() const noexcept { return diag_; }
  std::size_t size() const noexcept { return diag_.size(); }
  Matrix matrix() const { return Matrix::diagonal(diag_); }

  /// max_{i<j} d_j / d_i; 0 for n = 1.
  double zeta() const;

 private:
  Vector diag_;
};

enum class ScalingMode { Columns, Rows };

/// diag(||M(:,j)||_2) or diag(||M(j,:)||_2). ZeroVector(k) on a zero column/row.
ScalingMatrix heuristic_scaling(const Matrix& m, ScalingMode mode);

Matrix scale_rows(const ScalingMatrix& d, const Matrix& m);          // D M
Matrix scale_rows_inverse(const ScalingMatrix& d, const Matrix& m);  // D^{-1} M
Matrix scale_cols(const Matrix& m, const ScalingMatrix& d);          // M D
Matrix scale_cols_inverse(const Matrix& m, const ScalingMatrix& d);  // M D^{-1}

}  // namespace fperturb
