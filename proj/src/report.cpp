#include "fperturb/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fperturb/errors.hpp"

namespace fperturb {

namespace {

std::string format_number(double v, NumberFormat f) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  switch (f) {
    case NumberFormat::Scientific:
      std::snprintf(buf, sizeof buf, "%.2e", v);
      break;
    case NumberFormat::Fixed2:
      std::snprintf(buf, sizeof buf, "%.2f", v);
      break;
    case NumberFormat::Fixed3:
      std::snprintf(buf, sizeof buf, "%.3f", v);
      break;
    case NumberFormat::Full:
      std::snprintf(buf, sizeof buf, "%.17g", v);
      break;
    case NumberFormat::Compact:
      std::snprintf(buf, sizeof buf, "%g", v);
      break;
  }
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Cell Cell::number(double v, NumberFormat f) {
  Cell c;
  c.kind_ = Kind::Number;
  c.number_ = v;
  c.format_ = f;
  return c;
}

Cell Cell::maybe(const std::optional<double>& v, NumberFormat f) { return v ? number(*v, f) : missing(); }

Cell Cell::count(long long v) {
  Cell c;
  c.kind_ = Kind::Count;
  c.count_ = v;
  return c;
}

Cell Cell::text(std::string s) {
  Cell c;
  c.kind_ = Kind::Text;
  c.text_ = std::move(s);
  return c;
}

Cell Cell::flag(bool b) {
  Cell c;
  c.kind_ = Kind::Flag;
  c.flag_ = b;
  return c;
}

std::string Cell::render() const {
  switch (kind_) {
    case Kind::Missing:
      return "n/a";
    case Kind::Number:
      return format_number(number_, format_);
    case Kind::Count:
      return std::to_string(count_);
    case Kind::Text:
      return text_;
    case Kind::Flag:
      return flag_ ? "true" : "false";
  }
  return {};
}

nlohmann::ordered_json Cell::to_json() const {
  switch (kind_) {
    case Kind::Missing:
      return nullptr;
    case Kind::Number:
      // JSON has no inf/nan; keep them as strings rather than dropping them.
      if (!std::isfinite(number_)) return format_number(number_, format_);
      return number_;
    case Kind::Count:
      return count_;
    case Kind::Text:
      return text_;
    case Kind::Flag:
      return flag_;
  }
  return nullptr;
}

void Document::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DimensionMismatch("row width does not match the column count");
  rows.push_back(std::move(row));
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "markdown" || name == "md") return OutputFormat::Markdown;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

std::string render_csv(const Document& doc) {
  std::string out;
  auto line = [&out](const auto& items, auto&& text) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ',';
      out += csv_field(text(items[i]));
    }
    out += '\n';
  };
  line(doc.columns, [](const std::string& s) { return s; });
  for (const auto& row : doc.rows) line(row, [](const Cell& c) { return c.render(); });
  return out;
}

std::string render_markdown(const Document& doc) {
  std::string out;
  if (!doc.title.empty()) out += "## " + doc.title + "\n\n";
  out += '|';
  for (const std::string& c : doc.columns) out += ' ' + c + " |";
  out += "\n|";
  for (std::size_t i = 0; i < doc.columns.size(); ++i) out += "---:|";
  out += '\n';
  for (const auto& row : doc.rows) {
    out += '|';
    for (const Cell& c : row) out += ' ' + c.render() + " |";
    out += '\n';
  }
  return out;
}

std::string render_json(const Document& doc) {
  nlohmann::ordered_json j;
  j["config"] = doc.config;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : doc.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[doc.columns[i]] = row[i].to_json();
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["violations"] = doc.violations;
  j["timings"] = doc.timings;
  return j.dump(2) + "\n";
}

std::string render(const Document& doc, OutputFormat format) {
  switch (format) {
    case OutputFormat::Csv:
      return render_csv(doc);
    case OutputFormat::Markdown:
      return render_markdown(doc);
    case OutputFormat::Json:
      return render_json(doc);
  }
  return {};
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const std::string t = trim(field);
      double v = 0.0;
      const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": invalid number '" + t + "'");
      row.push_back(v);
    }
    if (!line.empty() && trim(line).back() == ',')
      throw ParseError("line " + std::to_string(line_no) + ": trailing comma");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                       " fields, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file is empty");
  return Matrix::from_rows(rows);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  return read_matrix_csv(in);
}

}  // namespace fperturb
