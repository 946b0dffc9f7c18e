#include "fperturb/tables.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fperturb/dense.hpp"
#include "fperturb/errors.hpp"
#include "fperturb/lu_bounds.hpp"
#include "fperturb/matgen.hpp"
#include "fperturb/qr_bounds.hpp"

namespace fperturb {

namespace {

using Clock = std::chrono::steady_clock;

struct Column {
  std::string name;
  NumberFormat format = NumberFormat::Scientific;
  bool timing = false;
};

using Row = std::vector<std::optional<double>>;
using Producer = std::function<std::vector<Row>(std::uint64_t seed)>;

Column param(std::string name) { return {std::move(name), NumberFormat::Compact, false}; }
Column sci(std::string name) { return {std::move(name), NumberFormat::Scientific, false}; }
Column ratio(std::string name) { return {std::move(name), NumberFormat::Fixed2, false}; }
Column seconds(std::string name) { return {std::move(name), NumberFormat::Fixed3, true}; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

Document assemble(int number, std::string title, const std::vector<Column>& columns, const Producer& produce,
                  const TableOptions& options) {
  if (options.seed_sweep == 0) throw Error("seed sweep must be at least 1");
  const auto start = Clock::now();
  std::vector<std::vector<Row>> runs;
  for (std::size_t k = 0; k < options.seed_sweep; ++k) runs.push_back(produce(options.seed + k));
  const double total = std::chrono::duration<double>(Clock::now() - start).count();

  Document doc;
  doc.title = std::move(title);
  doc.config["table"] = number;
  doc.config["seed"] = options.seed;
  doc.config["seed_sweep"] = options.seed_sweep;
  doc.config["deterministic"] = options.deterministic;
  for (const Column& c : columns) doc.columns.push_back(c.name);
  for (std::size_t r = 0; r < runs.front().size(); ++r) {
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::vector<double> values;
      for (const auto& run : runs)
        if (run[r][c]) values.push_back(*run[r][c]);
      if (values.empty()) {
        cells.push_back(Cell::missing());
      } else {
        const double v = columns[c].timing && options.deterministic ? 0.0 : median(values);
        cells.push_back(Cell::number(v, columns[c].format));
      }
    }
    doc.add_row(std::move(cells));
  }
  doc.timings["total_seconds"] = options.deterministic ? 0.0 : total;
  return doc;
}

// The componentwise QR quantities do not depend on eps; any admissible value works.
double qr_epsilon(std::size_t n) { return static_cast<double>(n) * kUnitRoundoff; }

// gamma_R, t, gamma_R(D_r), t, eta_D_r, gamma_R(D_e), t, eta_D_e, plus q in front when asked.
Row qr_row(const Matrix& a, const Matrix& c, bool with_q) {
  const QrFactors f = qr_factor(a);
  const QrComponentwiseAnalysis an(f, c);
  const QrComponentwiseReport r = an.evaluate(qr_epsilon(a.cols()));
  const QrScaledQuantities& dr = r.scaled.at(0);
  const QrScaledQuantities& de = r.scaled.at(1);
  Row row;
  if (with_q) row.push_back(r.q_ratio);
  for (double v : {r.gamma_R, an.seconds_gamma(), dr.gamma, an.seconds_scaled().at(0), dr.eta, de.gamma,
                   an.seconds_scaled().at(1), de.eta})
    row.push_back(v);
  return row;
}

std::vector<Column> qr_columns() {
  return {sci("gamma_R"),        seconds("t_gamma_R"),        sci("gamma_R(D_r)"), seconds("t_gamma_R(D_r)"),
          ratio("eta_D_r"),      sci("gamma_R(D_e)"),         seconds("t_gamma_R(D_e)"), ratio("eta_D_e")};
}

constexpr double kGrades1[] = {0.2, 1.0, 2.0};
constexpr double kGrades3[] = {0.8, 1.0, 2.0};

}  // namespace

std::uint64_t c_matrix_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

Document table1(const TableOptions& options) {
  const std::vector<Column> columns = {param("d1"),        param("d2"),        sci("gamma_L"),    sci("gamma_L(D_L)"),
                                       ratio("eta_D_L"),   sci("gamma_U"),     sci("gamma_U(D_U)"), ratio("eta_D_U"),
                                       seconds("t_gamma"), seconds("t_gamma(D)"), sci("tau")};
  const Producer produce = [](std::uint64_t seed) {
    constexpr std::size_t n = 10;
    const double eps = gaussian_elimination_epsilon(n);
    std::vector<Row> rows;
    for (double d1 : kGrades1)
      for (double d2 : kGrades1) {
        const LuComponentwiseAnalysis an(lu_factor(graded_random(n, d1, d2, seed)));
        const LuComponentwiseReport r = an.evaluate(eps);
        rows.push_back({d1, d2, r.gamma_L, r.gamma_L_D, r.eta_DL, r.gamma_U, r.gamma_U_D, r.eta_DU,
                        an.seconds_gamma(), an.seconds_gamma_scaled(), r.tau});
      }
    return rows;
  };
  return assemble(1, "Componentwise LU bounds for A = D1 B D2, n = 10", columns, produce, options);
}

Document table2(const TableOptions& options) {
  std::vector<Column> columns = {param("n")};
  for (Column& c : qr_columns()) columns.push_back(std::move(c));
  const Producer produce = [](std::uint64_t seed) {
    std::vector<Row> rows;
    for (std::size_t n = 5; n <= 25; n += 5) {
      Row row{static_cast<double>(n)};
      const Row q = qr_row(kahan(n, std::numbers::pi / 8), random_c_matrix(n, c_matrix_seed(seed)), false);
      row.insert(row.end(), q.begin(), q.end());
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return assemble(2, "Componentwise QR bounds for the Kahan matrix, theta = pi/8", columns, produce, options);
}

Document table3(const TableOptions& options) {
  std::vector<Column> columns = {param("d1"), param("d2"), ratio("q")};
  for (Column& c : qr_columns()) columns.push_back(std::move(c));
  const Producer produce = [](std::uint64_t seed) {
    constexpr std::size_t n = 20;
    const Matrix c = random_c_matrix(n, c_matrix_seed(seed));
    std::vector<Row> rows;
    for (double d1 : kGrades3)
      for (double d2 : kGrades3) {
        Row row{d1, d2};
        const Row q = qr_row(graded_random(n, d1, d2, seed), c, true);
        row.insert(row.end(), q.begin(), q.end());
        rows.push_back(std::move(row));
      }
    return rows;
  };
  return assemble(3, "Componentwise QR bounds for A = D1 B D2, n = 20", columns, produce, options);
}

Document table4(const TableOptions& options) {
  std::vector<Column> columns = {param("n"), ratio("q")};
  for (Column& c : qr_columns()) columns.push_back(std::move(c));
  const Producer produce = [](std::uint64_t seed) {
    std::vector<Row> rows;
    for (std::size_t n = 20; n <= 55; n += 5) {
      Row row{static_cast<double>(n)};
      const Row q = qr_row(graded_random(n, 0.8, 0.8, seed), random_c_matrix(n, c_matrix_seed(seed)), true);
      row.insert(row.end(), q.begin(), q.end());
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return assemble(4, "Componentwise QR bounds for A = D1 B D2, d1 = d2 = 0.8", columns, produce, options);
}

Document run_table(int number, const TableOptions& options) {
  switch (number) {
    case 1:
      return table1(options);
    case 2:
      return table2(options);
    case 3:
      return table3(options);
    case 4:
      return table4(options);
  }
  throw Error("table number must be 1, 2, 3 or 4");
}

}  // namespace fperturb
