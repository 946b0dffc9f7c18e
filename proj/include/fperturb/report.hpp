#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fperturb/matrix.hpp"

namespace fperturb {

enum class NumberFormat {
  Scientific,  // 3 significant digits, e.g. 4.31e+01
  Fixed2,      // ratios such as eta and q
  Fixed3,      // seconds
  Full,        // 17 significant digits, round-trips through text
  Compact,     // shortest %g form, for parameters such as n and d
};

/// One table entry. Missing values render as "n/a" and as JSON null.
class Cell {
 public:
  static Cell missing() { return Cell(); }
  static Cell number(double v, NumberFormat f = NumberFormat::Scientific);
  static Cell maybe(const std::optional<double>& v, NumberFormat f = NumberFormat::Scientific);
  static Cell count(long long v);
  static Cell text(std::string s);
  static Cell flag(bool b);

  bool is_missing() const noexcept { return kind_ == Kind::Missing; }
  std::string render() const;
  nlohmann::ordered_json to_json() const;

 private:
  enum class Kind { Missing, Number, Count, Text, Flag };
  Cell() = default;

  Kind kind_ = Kind::Missing;
  double number_ = 0.0;
  long long count_ = 0;
  NumberFormat format_ = NumberFormat::Scientific;
  std::string text_;
  bool flag_ = false;
};

/// A rendered result: JSON carries {config, rows[], violations, timings};
/// CSV and Markdown carry the rows only, Markdown under the title.
struct Document {
  std::string title;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  long long violations = 0;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();

  void add_row(std::vector<Cell> row);
};

enum class OutputFormat { Csv, Markdown, Json };

std::optional<OutputFormat> parse_output_format(std::string_view name);

std::string render_csv(const Document& doc);
std::string render_markdown(const Document& doc);
std::string render_json(const Document& doc);
std::string render(const Document& doc, OutputFormat format);

/// Plain CSV: one matrix row per line, no header, decimal floats. Blank
/// lines are ignored. Throws ParseError on empty input, non-numeric fields or
/// ragged rows.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_file(const std::string& path);

}  // namespace fperturb
