#include "fperturb/structured.hpp"

#include <cmath>
#include <string>

#include "fperturb/errors.hpp"

namespace fperturb {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (!a.is_square()) throw DimensionMismatch(std::string(what) + " requires a square matrix");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vector apply_stage(const StructuredOperator::Stage& stage, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [&](const StructuredOperator::Kronecker& k) { return kronecker_apply(k.left, k.right, x); },
          [&](const StructuredOperator::Selection& s) {
            return s.transposed ? s.matrix.apply_transpose(x) : s.matrix.apply(x);
          },
          [&](const StructuredOperator::Permutation& p) { return p.perm.apply(x); },
          [&](const StructuredOperator::Sum& s) {
            Vector y(s.terms.front().output_dim(), 0.0);
            for (const auto& term : s.terms) {
              const Vector t = term.apply(x);
              for (std::size_t i = 0; i < y.size(); ++i) y[i] += t[i];
            }
            return y;
          },
          [&](const StructuredOperator::Dense& d) { return d.matrix * x; },
      },
      stage);
}

Vector apply_stage_transpose(const StructuredOperator::Stage& stage, std::span<const double> y) {
  return std::visit(
      Overloaded{
          [&](const StructuredOperator::Kronecker& k) {
            return kronecker_apply(k.left.transposed(), k.right.transposed(), y);
          },
          [&](const StructuredOperator::Selection& s) {
            return s.transposed ? s.matrix.apply(y) : s.matrix.apply_transpose(y);
          },
          [&](const StructuredOperator::Permutation& p) { return p.perm.apply_transpose(y); },
          [&](const StructuredOperator::Sum& s) {
            Vector x(s.terms.front().input_dim(), 0.0);
            for (const auto& term : s.terms) {
              const Vector t = term.apply_transpose(y);
              for (std::size_t i = 0; i < x.size(); ++i) x[i] += t[i];
            }
            return x;
          },
          [&](const StructuredOperator::Dense& d) {
            Vector x(d.matrix.cols(), 0.0);
            for (std::size_t j = 0; j < d.matrix.cols(); ++j) x[j] = dot(d.matrix.column(j), y);
            return x;
          },
      },
      stage);
}

StructuredOperator::Stage transpose_stage(const StructuredOperator::Stage& stage) {
  return std::visit(
      Overloaded{
          [](const StructuredOperator::Kronecker& k) -> StructuredOperator::Stage {
            return StructuredOperator::Kronecker{k.left.transposed(), k.right.transposed()};
          },
          [](const StructuredOperator::Selection& s) -> StructuredOperator::Stage {
            return StructuredOperator::Selection{s.matrix, !s.transposed};
          },
          [](const StructuredOperator::Permutation& p) -> StructuredOperator::Stage {
            return StructuredOperator::Permutation{p.perm.transposed()};
          },
          [](const StructuredOperator::Sum& s) -> StructuredOperator::Stage {
            StructuredOperator::Sum t;
            for (const auto& term : s.terms) t.terms.push_back(term.transposed());
            return t;
          },
          [](const StructuredOperator::Dense& d) -> StructuredOperator::Stage {
            return StructuredOperator::Dense{d.matrix.transposed()};
          },
      },
      stage);
}

}  // namespace

std::size_t selection_output_dim(SelectionKind kind, std::size_t n) {
  switch (kind) {
    case SelectionKind::Uvec:
      return n * (n + 1) / 2;
    case SelectionKind::Slvec:
      return n * (n - 1) / 2;
    default:
      return n * n;
  }
}

Vector uvec(const Matrix& a) {
  require_square(a, "uvec");
  Vector out;
  out.reserve(selection_output_dim(SelectionKind::Uvec, a.rows()));
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) out.push_back(a(i, j));
  return out;
}

Vector slvec(const Matrix& a) {
  require_square(a, "slvec");
  Vector out;
  out.reserve(selection_output_dim(SelectionKind::Slvec, a.rows()));
  for (std::size_t j = 0; j + 1 < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i) out.push_back(a(i, j));
  return out;
}

Matrix up(const Matrix& a) {
  Matrix u = ut(a);
  for (std::size_t i = 0; i < u.rows(); ++i) u(i, i) *= 0.5;
  return u;
}

Matrix ut(const Matrix& a) {
  require_square(a, "ut");
  Matrix u(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i <= j; ++i) u(i, j) = a(i, j);
  return u;
}

Matrix slt(const Matrix& a) { return a - ut(a); }

Matrix uvec_inverse(std::span<const double> x, std::size_t n) {
  if (x.size() != selection_output_dim(SelectionKind::Uvec, n)) throw DimensionMismatch("uvec_inverse");
  Matrix a(n, n);
  std::size_t r = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) a(i, j) = x[r++];
  return a;
}

Matrix slvec_inverse(std::span<const double> x, std::size_t n) {
  if (x.size() != selection_output_dim(SelectionKind::Slvec, n)) throw DimensionMismatch("slvec_inverse");
  Matrix a(n, n);
  std::size_t r = 0;
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) a(i, j) = x[r++];
  return a;
}

SelectionMatrix::SelectionMatrix(SelectionKind kind, std::size_t n)
    : kind_(kind), n_(n), rows_(selection_output_dim(kind, n)) {
  std::size_t r = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = j * n + i;
      switch (kind) {
        case SelectionKind::Uvec:
          if (i <= j) entries_.push_back({r++, c, 1.0});
          break;
        case SelectionKind::Slvec:
          if (i > j) entries_.push_back({r++, c, 1.0});
          break;
        case SelectionKind::Up:
          if (i < j) entries_.push_back({c, c, 1.0});
          if (i == j) entries_.push_back({c, c, 0.5});
          break;
        case SelectionKind::Ut:
          if (i <= j) entries_.push_back({c, c, 1.0});
          break;
        case SelectionKind::Slt:
          if (i > j) entries_.push_back({c, c, 1.0});
          break;
      }
    }
  }
}

Vector SelectionMatrix::apply(std::span<const double> x) const {
  if (x.size() != cols()) throw DimensionMismatch("selection apply");
  Vector y(rows_, 0.0);
  for (const Entry& e : entries_) y[e.row] += e.value * x[e.col];
  return y;
}

Vector SelectionMatrix::apply_transpose(std::span<const double> y) const {
  if (y.size() != rows_) throw DimensionMismatch("selection apply_transpose");
  Vector x(cols(), 0.0);
  for (const Entry& e : entries_) x[e.col] += e.value * y[e.row];
  return x;
}

Matrix SelectionMatrix::to_dense() const {
  Matrix m(rows_, cols());
  for (const Entry& e : entries_) m(e.row, e.col) = e.value;
  return m;
}

SelectionMatrix selection_matrix(SelectionKind kind, std::size_t n) { return {kind, n}; }

Vector VecPermutation::apply(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionMismatch("vec permutation apply");
  Vector y(dim());
  // x = vec(A), A is m x n; y = vec(A^T), A^T is n x m.
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t i = 0; i < m_; ++i) y[i * n_ + j] = x[j * m_ + i];
  return y;
}

Vector VecPermutation::apply_transpose(std::span<const double> y) const {
  return transposed().apply(y);
}

Vector vec_permutation_apply(std::size_t m, std::size_t n, std::span<const double> x) {
  return VecPermutation(m, n).apply(x);
}

Vector kronecker_apply(const Matrix& a, const Matrix& b, std::span<const double> x) {
  if (x.size() != a.cols() * b.cols()) throw DimensionMismatch("kronecker_apply: input length");
  const Matrix xm = unvec(x, b.cols(), a.cols());
  const Matrix bx = b * xm;  // q x m
  Matrix y(b.rows(), a.rows());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    double* yk = y.data().data() + k * y.rows();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double akj = a(k, j);
      if (akj == 0.0) continue;
      const double* bj = bx.data().data() + j * bx.rows();
      for (std::size_t i = 0; i < bx.rows(); ++i) yk[i] += bj[i] * akj;
    }
  }
  return vec(y);
}

Matrix kronecker_dense(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ja = 0; ja < a.cols(); ++ja)
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
      for (std::size_t jb = 0; jb < b.cols(); ++jb)
        for (std::size_t ib = 0; ib < b.rows(); ++ib)
          k(ia * b.rows() + ib, ja * b.cols() + jb) = a(ia, ja) * b(ib, jb);
  return k;
}

StructuredOperator StructuredOperator::identity(std::size_t dim) {
  return StructuredOperator(dim, dim, {});
}

StructuredOperator StructuredOperator::kron(Matrix left, Matrix right) {
  const std::size_t out = left.rows() * right.rows();
  const std::size_t in = left.cols() * right.cols();
  return StructuredOperator(out, in, {Kronecker{std::move(left), std::move(right)}});
}

StructuredOperator StructuredOperator::select(SelectionKind kind, std::size_t n) {
  SelectionMatrix s(kind, n);
  const std::size_t out = s.rows();
  return StructuredOperator(out, n * n, {Selection{std::move(s), false}});
}

StructuredOperator StructuredOperator::select_transpose(SelectionKind kind, std::size_t n) {
  SelectionMatrix s(kind, n);
  const std::size_t in = s.rows();
  return StructuredOperator(n * n, in, {Selection{std::move(s), true}});
}

StructuredOperator StructuredOperator::vec_permutation(std::size_t m, std::size_t n) {
  return StructuredOperator(m * n, m * n, {Permutation{VecPermutation(m, n)}});
}

StructuredOperator StructuredOperator::sum(std::vector<StructuredOperator> terms) {
  if (terms.empty()) throw DimensionMismatch("sum of zero operators");
  const std::size_t out = terms.front().output_dim();
  const std::size_t in = terms.front().input_dim();
  for (const auto& t : terms)
    if (t.output_dim() != out || t.input_dim() != in) throw DimensionMismatch("sum terms differ in shape");
  return StructuredOperator(out, in, {Sum{std::move(terms)}});
}

StructuredOperator StructuredOperator::dense(Matrix m) {
  const std::size_t out = m.rows();
  const std::size_t in = m.cols();
  return StructuredOperator(out, in, {Dense{std::move(m)}});
}

StructuredOperator operator*(const StructuredOperator& lhs, const StructuredOperator& rhs) {
  if (lhs.input_dim() != rhs.output_dim()) {
    throw DimensionMismatch("operator composition: " + std::to_string(lhs.input_dim()) + " vs " +
                            std::to_string(rhs.output_dim()));
  }
  std::vector<StructuredOperator::Stage> stages = lhs.stages_;
  stages.insert(stages.end(), rhs.stages_.begin(), rhs.stages_.end());
  return StructuredOperator(lhs.output_dim(), rhs.input_dim(), std::move(stages));
}

Vector StructuredOperator::apply(std::span<const double> x) const {
  if (x.size() != input_dim_) throw DimensionMismatch("operator apply: input length");
  Vector v(x.begin(), x.end());
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) v = apply_stage(*it, v);
  return v;
}

Vector StructuredOperator::apply_transpose(std::span<const double> y) const {
  if (y.size() != output_dim_) throw DimensionMismatch("operator apply_transpose: input length");
  Vector v(y.begin(), y.end());
  for (const Stage& stage : stages_) v = apply_stage_transpose(stage, v);
  return v;
}

StructuredOperator StructuredOperator::transposed() const {
  std::vector<Stage> stages;
  stages.reserve(stages_.size());
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) stages.push_back(transpose_stage(*it));
  return StructuredOperator(input_dim_, output_dim_, std::move(stages));
}

Matrix StructuredOperator::materialize(std::size_t threshold) const {
  if (input_dim_ > threshold) {
    throw TooLarge("operator input dimension " + std::to_string(input_dim_) +
                   " exceeds explicit threshold " + std::to_string(threshold));
  }
  if (stages_.size() == 1) {
    if (const auto* d = std::get_if<Dense>(&stages_.front())) return d->matrix;
  }
  Matrix m(output_dim_, input_dim_);
  Vector e(input_dim_, 0.0);
  for (std::size_t j = 0; j < input_dim_; ++j) {
    e[j] = 1.0;
    const Vector col = apply(e);
    e[j] = 0.0;
    std::copy(col.begin(), col.end(), m.data().begin() + static_cast<std::ptrdiff_t>(j * output_dim_));
  }
  return m;
}

StructuredOperator abs(const StructuredOperator& op, std::size_t threshold) {
  return StructuredOperator::dense(abs(op.materialize(threshold)));
}

Matrix operator_materialize(const StructuredOperator& op, std::size_t threshold) {
  return op.materialize(threshold);
}

SpectralEstimate operator_spectral_estimate(const StructuredOperator& op, const PowerIterationOptions& opts) {
  if (op.output_dim() == 0) {
    SpectralEstimate est;
    est.right.assign(op.input_dim(), 0.0);
    return est;
  }
  // Transposed stages are built once, not per iteration.
  const StructuredOperator opt = op.transposed();
  return power_iteration(
      op.input_dim(), [&](std::span<const double> x) { return op.apply(x); },
      [&](std::span<const double> y) { return opt.apply(y); }, opts);
}

double operator_spectral_norm(const StructuredOperator& op, const PowerIterationOptions& opts) {
  return operator_spectral_estimate(op, opts).sigma;
}

}  // namespace fperturb
