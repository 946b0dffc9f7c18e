#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "fperturb/documents.hpp"
#include "fperturb/errors.hpp"
#include "fperturb/lu_bounds.hpp"
#include "fperturb/report.hpp"
#include "fperturb/tables.hpp"

using namespace fperturb;

namespace {

Matrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_csv(in);
}

Document sample() {
  Document doc;
  doc.title = "Sample";
  doc.columns = {"name", "value", "ok"};
  doc.add_row({Cell::text("x"), Cell::number(1.5, NumberFormat::Full), Cell::flag(true)});
  doc.add_row({Cell::text("y"), Cell::missing(), Cell::flag(false)});
  return doc;
}

}  // namespace

TEST(ReadMatrix, ParsesRows) {
  EXPECT_EQ(parse("1,2\n3,4\n"), Matrix::from_rows({{1, 2}, {3, 4}}));
  EXPECT_EQ(parse("1.5e-3, -2\n\n3,4"), Matrix::from_rows({{1.5e-3, -2}, {3, 4}}));
}

TEST(ReadMatrix, RejectsMalformedInput) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("\n\n"), ParseError);
  EXPECT_THROW(parse("1,abc\n"), ParseError);
  EXPECT_THROW(parse("1,2,\n3,4,\n"), ParseError);
  EXPECT_THROW(parse("1,2\n3\n"), ParseError);
  EXPECT_THROW(read_matrix_file("/nonexistent/path.csv"), ParseError);
}

TEST(Cells, Rendering) {
  EXPECT_EQ(Cell::missing().render(), "n/a");
  EXPECT_EQ(Cell::number(0.5, NumberFormat::Fixed2).render(), "0.50");
  EXPECT_EQ(Cell::number(1234.5).render(), "1.23e+03");
  EXPECT_EQ(Cell::maybe(std::nullopt).render(), "n/a");
  EXPECT_EQ(Cell::count(7).render(), "7");
  EXPECT_EQ(Cell::flag(true).render(), "true");
  EXPECT_TRUE(Cell::missing().to_json().is_null());
  EXPECT_TRUE(Cell::number(std::numeric_limits<double>::infinity()).to_json().is_string());
}

TEST(Document, RowWidthMustMatch) {
  Document doc = sample();
  EXPECT_THROW(doc.add_row({Cell::text("z")}), DimensionMismatch);
}

TEST(Render, Csv) { EXPECT_EQ(render_csv(sample()), "name,value,ok\nx,1.5,true\ny,n/a,false\n"); }

TEST(Render, Markdown) {
  const std::string md = render_markdown(sample());
  EXPECT_EQ(md.rfind("## Sample\n", 0), 0u);
  EXPECT_NE(md.find("| name | value | ok |"), std::string::npos);
  EXPECT_NE(md.find("| x | 1.5 | true |"), std::string::npos);
}

TEST(Render, JsonSchema) {
  const nlohmann::json j = nlohmann::json::parse(render_json(sample()));
  for (const char* key : {"config", "rows", "violations", "timings"}) EXPECT_TRUE(j.contains(key)) << key;
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["value"], 1.5);
  EXPECT_TRUE(j["rows"][1]["value"].is_null());
}

TEST(OutputFormatNames, Parse) {
  EXPECT_EQ(parse_output_format("csv"), OutputFormat::Csv);
  EXPECT_EQ(parse_output_format("md"), OutputFormat::Markdown);
  EXPECT_EQ(parse_output_format("json"), OutputFormat::Json);
  EXPECT_FALSE(parse_output_format("xml").has_value());
}

TEST(BoundDocuments, InapplicableRowsShowNa) {
  const LuNormwiseReport r = lu_normwise_bounds(lu_factor(Matrix::identity(3)), 0.3);
  ASSERT_FALSE(r.applicable);
  const std::string csv = render_csv(lu_normwise_document(r));
  EXPECT_NE(csv.find("rigorous_dl,n/a,"), std::string::npos);
  EXPECT_NE(csv.find("first_order_dl,0.29999999999999999,"), std::string::npos);
}

TEST(Tables, RejectsUnknownNumber) {
  EXPECT_THROW(run_table(0, {}), Error);
  EXPECT_THROW(run_table(5, {}), Error);
}

TEST(Tables, KahanTableShape) {
  TableOptions opts;
  opts.deterministic = true;
  const Document doc = run_table(2, opts);
  ASSERT_EQ(doc.rows.size(), 5u);
  EXPECT_EQ(doc.columns.front(), "n");
  EXPECT_EQ(doc.columns.size(), 9u);
  EXPECT_EQ(doc.rows[0][0].render(), "5");
}

TEST(Tables, DeterministicOutputIsByteIdentical) {
  TableOptions opts;
  opts.deterministic = true;
  EXPECT_EQ(render_json(run_table(2, opts)), render_json(run_table(2, opts)));
  EXPECT_EQ(render_csv(run_table(1, opts)), render_csv(run_table(1, opts)));
}
