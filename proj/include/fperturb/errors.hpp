#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fperturb {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// The k-th pivot (1-based) of the pivot-free elimination vanished to working
// precision, i.e. the k-th leading principal minor is numerically singular.
class SingularLeadingMinor : public Error {
 public:
  explicit SingularLeadingMinor(std::size_t k)
      : Error("leading principal minor " + std::to_string(k) + " is singular"),
        index_(k) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(std::size_t column)
      : Error("matrix is column rank deficient at column " + std::to_string(column)),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(int iterations)
      : Error("power iteration did not converge after " + std::to_string(iterations) +
              " iterations"),
        iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

// Zero diagonal entry k (1-based) of a triangular matrix.
class SingularDiagonal : public Error {
 public:
  explicit SingularDiagonal(std::size_t k)
      : Error("triangular matrix has a zero diagonal entry at " + std::to_string(k)),
        index_(k) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Dense materialization requested above the explicit threshold.
class TooLarge : public Error {
 public:
  using Error::Error;
};

using AbsOperatorTooLarge = TooLarge;

// Zero column/row k (1-based) where a positive scaling entry was required.
class ZeroVector : public Error {
 public:
  explicit ZeroVector(std::size_t k)
      : Error("zero vector at index " + std::to_string(k)), index_(k) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Malformed matrix input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fperturb
