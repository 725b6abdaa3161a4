#include "msvar/error.hpp"
#include "msvar/timeseries.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace msvar;

namespace {

Series with_gaps(int first_year, const std::vector<std::optional<double>>& v) {
  Series s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.years.push_back(first_year + static_cast<int>(i));
    s.values.push_back(v[i]);
  }
  return s;
}

std::vector<TimeSeriesPanel> parse(const std::string& text, const CsvSchema& schema = {}) {
  std::istringstream in(text);
  return load_panel(in, schema);
}

}  // namespace

TEST(LoadPanel, LongFormatGroupsByCountryAndAlignsYears) {
  const auto panels = parse(
      "country,series,year,value\n"
      "SI,hc,2001,2\n"
      "CZ,hc,2000,1\n"
      "CZ,hc,2001,1.5\n"
      "CZ,hdi,2001,7\n");
  ASSERT_EQ(panels.size(), 2u);
  EXPECT_EQ(panels[0].country_id, "CZ");
  EXPECT_EQ(panels[1].country_id, "SI");
  const Series& hdi = panels[0].get("hdi");
  EXPECT_EQ(hdi.years, (std::vector<int>{2000, 2001}));
  EXPECT_FALSE(hdi.values[0].has_value());
  EXPECT_DOUBLE_EQ(*hdi.values[1], 7.0);
}

TEST(LoadPanel, WideFormatWithQuotedFieldsAndBom) {
  CsvSchema schema;
  schema.layout = CsvLayout::wide_format;
  schema.default_country = "X";
  const auto panels = parse("\xEF\xBB\xBFyear,\"hc\",hdi\n2000,1,2\n2001,\"3\",\n", schema);
  ASSERT_EQ(panels.size(), 1u);
  EXPECT_EQ(panels[0].country_id, "X");
  EXPECT_DOUBLE_EQ(*panels[0].get("hc").values[1], 3.0);
  EXPECT_FALSE(panels[0].get("hdi").values[1].has_value());
}

TEST(LoadPanel, SkipsLeadingCommentLines) {
  const auto panels = parse("# seed: 1\n# version: x\ncountry,series,year,value\nA,y,1,2\n");
  ASSERT_EQ(panels.size(), 1u);
  EXPECT_DOUBLE_EQ(*panels[0].get("y").values[0], 2.0);
}

TEST(LoadPanel, DuplicateObservationIsReportedWithRows) {
  try {
    parse("country,series,year,value\nA,y,1,2\nA,y,1,3\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(LoadPanel, EmptyInputRejected) {
  EXPECT_THROW(parse(""), ValidationError);
}

TEST(LoadPanel, UnknownSeriesListsAvailable) {
  const auto panels = parse("country,series,year,value\nA,hc,1,2\n");
  try {
    panels[0].get("gdp");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("hc"), std::string::npos);
  }
}

TEST(Interpolate, LinearInteriorGap) {
  const Series s = interpolate_missing(with_gaps(2000, {10.0, std::nullopt, std::nullopt, 40.0}));
  EXPECT_DOUBLE_EQ(*s.values[1], 20.0);
  EXPECT_DOUBLE_EQ(*s.values[2], 30.0);
}

TEST(Interpolate, EdgeGapsNameTheYear) {
  try {
    interpolate_missing(with_gaps(2000, {std::nullopt, 1.0, 2.0}));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("2000"), std::string::npos);
  }
  EXPECT_THROW(interpolate_missing(with_gaps(2000, {1.0, 2.0, std::nullopt})), ValidationError);
}

TEST(Transforms, DifferenceDeflateShare) {
  const Series x = Series::from_values(2000, {1.0, 4.0, 9.0, 16.0});
  const Series d1 = difference(x, 1);
  EXPECT_EQ(d1.years.front(), 2001);
  EXPECT_DOUBLE_EQ(*d1.values[2], 7.0);
  const Series d2 = difference(x, 2);
  EXPECT_DOUBLE_EQ(*d2.values[0], 2.0);
  EXPECT_DOUBLE_EQ(*d2.values[1], 2.0);

  const Series price = Series::from_values(2000, {1.0, 2.0, 4.0, 8.0});
  EXPECT_DOUBLE_EQ(*deflate(x, price).values[3], 2.0);
  EXPECT_DOUBLE_EQ(*gdp_share(x, price).values[1], 200.0);
}

TEST(Transforms, NonPositiveDenominatorNamesYear) {
  const Series x = Series::from_values(2000, {1.0, 2.0});
  const Series bad = Series::from_values(2000, {1.0, 0.0});
  try {
    deflate(x, bad);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("2001"), std::string::npos);
  }
}

TEST(Transforms, MissingPropagatesThroughDeflate) {
  const Series x = with_gaps(2000, {1.0, std::nullopt});
  const Series p = Series::from_values(2000, {1.0, 1.0});
  EXPECT_FALSE(deflate(x, p).values[1].has_value());
}

TEST(BuildDataset, AppliesPlanAndBuildsDummy) {
  TimeSeriesPanel panel;
  panel.country_id = "A";
  panel.series["a"] = Series::from_values(2017, {1, 2, 4, 7, 11, 16, 22});
  panel.series["b"] = Series::from_values(2016, {5, 5, 6, 6, 7, 7, 8, 8});
  SeriesTransformPlan plan;
  plan.steps["a"] = {DifferenceStep{1}};
  ModelSpec spec;
  spec.endogenous = {"a", "b"};
  spec.exogenous = {"covid"};
  spec.n_regimes = 2;
  const ModelDataset d = build_dataset(panel, plan, spec);
  EXPECT_EQ(d.year_index, (std::vector<int>{2018, 2019, 2020, 2021, 2022, 2023}));
  EXPECT_EQ(d.effective_T, 5);
  EXPECT_DOUBLE_EQ(d.Y(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.Y(0, 1), 6.0);
  EXPECT_DOUBLE_EQ(d.X_exog(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.X_exog(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.X_exog(4, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.X_exog(5, 0), 0.0);
}

TEST(BuildDataset, InteriorGapIsAnError) {
  TimeSeriesPanel panel;
  panel.country_id = "A";
  panel.series["a"] = with_gaps(2000, {1.0, std::nullopt, 3.0, 4.0});
  ModelSpec spec;
  spec.endogenous = {"a"};
  spec.n_regimes = 1;
  EXPECT_THROW(build_dataset(panel, {}, spec), ValidationError);
  SeriesTransformPlan plan;
  plan.steps["a"] = {InterpolateStep{}};
  EXPECT_NO_THROW(build_dataset(panel, plan, spec));
}
