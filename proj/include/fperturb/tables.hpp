#pragma once

#include <cstddef>
#include <cstdint>

#include "fperturb/report.hpp"

namespace fperturb {

struct TableOptions {
  std::uint64_t seed = 1;
  /// Number of consecutive seeds (seed, seed + 1, ...); every cell reports
  /// the median over them.
  std::size_t seed_sweep = 1;
  /// Report zero for every timing so that output is byte-identical per seed.
  bool deterministic = false;
};

/// Seed for the random C matrix paired with the B matrix of `seed`.
std::uint64_t c_matrix_seed(std::uint64_t seed);

/// Componentwise LU quantities for A = D1 B D2, n = 10, d1, d2 in {0.2, 1, 2},
/// one B for all rows, eps = n u / (1 - n u).
Document table1(const TableOptions& options);
/// Componentwise QR quantities for Kahan(n, pi/8), n = 5, 10, ..., 25.
Document table2(const TableOptions& options);
/// Componentwise QR quantities for A = D1 B D2, n = 20, d1, d2 in {0.8, 1, 2},
/// one B and one C for all rows.
Document table3(const TableOptions& options);
/// Componentwise QR quantities for A = D1 B D2, d1 = d2 = 0.8, n = 20, 25, ..., 55.
Document table4(const TableOptions& options);

/// Dispatches on `number` in 1..4; throws Error otherwise.
Document run_table(int number, const TableOptions& options);

}  // namespace fperturb
