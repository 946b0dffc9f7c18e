#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "fperturb/dense.hpp"
#include "fperturb/matrix.hpp"

namespace fperturb {

// Vectorization and projection operators on n x n matrices:
//   Uvec  : R^{n^2} -> R^{n(n+1)/2}, stacks the first j entries of column j
//   Slvec : R^{n^2} -> R^{n(n-1)/2}, stacks the last n-j entries of column j
//   Up    : upper triangle with halved diagonal
//   Ut    : upper triangle
//   Slt   : strictly lower triangle, slt(A) = A - ut(A)
enum class SelectionKind { Uvec, Slvec, Up, Ut, Slt };

std::size_t selection_output_dim(SelectionKind kind, std::size_t n);

Vector uvec(const Matrix& a);
Vector slvec(const Matrix& a);
Matrix up(const Matrix& a);
Matrix ut(const Matrix& a);
Matrix slt(const Matrix& a);

/// Right inverses: uvec_inverse(uvec(A)) = ut(A), slvec_inverse(slvec(A)) = slt(A).
Matrix uvec_inverse(std::span<const double> x, std::size_t n);
Matrix slvec_inverse(std::span<const double> x, std::size_t n);

/// Sparse 0 / 1 / 1/2 matrix representing one of the selection operators
/// acting on column-major vec(A).
class SelectionMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SelectionMatrix(SelectionKind kind, std::size_t n);

  SelectionKind kind() const noexcept { return kind_; }
  std::size_t order() const noexcept { return n_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return n_ * n_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> y) const;
  Matrix to_dense() const;

 private:
  SelectionKind kind_;
  std::size_t n_;
  std::size_t rows_;
  std::vector<Entry> entries_;
};

SelectionMatrix selection_matrix(SelectionKind kind, std::size_t n);

/// Pi_{mn}: maps vec(A) to vec(A^T) for A of size m x n.
class VecPermutation {
 public:
  VecPermutation(std::size_t m, std::size_t n) : m_(m), n_(n) {}
  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return m_ * n_; }
  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> y) const;
  VecPermutation transposed() const { return {n_, m_}; }

 private:
  std::size_t m_;
  std::size_t n_;
};

Vector vec_permutation_apply(std::size_t m, std::size_t n, std::span<const double> x);

/// (A kron B) x computed as vec(B X A^T) with X = unvec(x), never forming A kron B.
Vector kronecker_apply(const Matrix& a, const Matrix& b, std::span<const double> x);
Matrix kronecker_dense(const Matrix& a, const Matrix& b);

inline constexpr std::size_t kExplicitThreshold = 4096;

/// Implicit linear map R^input_dim -> R^output_dim, stored as a product of
/// stages in left-to-right (mathematical) order.
class StructuredOperator {
 public:
  struct Kronecker {
    Matrix left;
    Matrix right;
  };
  struct Selection {
    SelectionMatrix matrix;
    bool transposed = false;
  };
  struct Permutation {
    VecPermutation perm;
  };
  struct Sum {
    std::vector<StructuredOperator> terms;
  };
  struct Dense {
    Matrix matrix;
  };
  using Stage = std::variant<Kronecker, Selection, Permutation, Sum, Dense>;

  static StructuredOperator identity(std::size_t dim);
  static StructuredOperator kron(Matrix left, Matrix right);
  static StructuredOperator select(SelectionKind kind, std::size_t n);
  static StructuredOperator select_transpose(SelectionKind kind, std::size_t n);
  static StructuredOperator vec_permutation(std::size_t m, std::size_t n);
  static StructuredOperator sum(std::vector<StructuredOperator> terms);
  static StructuredOperator dense(Matrix m);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  const std::vector<Stage>& stages() const noexcept { return stages_; }

  Vector apply(std::span<const double> x) const;
  Vector apply_transpose(std::span<const double> y) const;

  /// Dense matrix of the operator; TooLarge when input_dim > threshold.
  Matrix materialize(std::size_t threshold = kExplicitThreshold) const;

  StructuredOperator transposed() const;

  /// Composition (*this) * rhs, i.e. rhs is applied first.
  friend StructuredOperator operator*(const StructuredOperator& lhs, const StructuredOperator& rhs);

 private:
  StructuredOperator(std::size_t out, std::size_t in, std::vector<Stage> stages)
      : output_dim_(out), input_dim_(in), stages_(std::move(stages)) {}

  std::size_t output_dim_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<Stage> stages_;
};

/// |op| taken entrywise on the materialized matrix. There is no matrix-free
/// form: the absolute value does not distribute over the stage product.
StructuredOperator abs(const StructuredOperator& op, std::size_t threshold = kExplicitThreshold);

Matrix operator_materialize(const StructuredOperator& op, std::size_t threshold = kExplicitThreshold);

SpectralEstimate operator_spectral_estimate(const StructuredOperator& op,
                                            const PowerIterationOptions& opts = {});
double operator_spectral_norm(const StructuredOperator& op, const PowerIterationOptions& opts = {});

}  // namespace fperturb
