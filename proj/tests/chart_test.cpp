#include "support/situations.hpp"
#include "tsc/chart.hpp"
#include "tsc/spec_parser.hpp"

#include <gtest/gtest.h>

namespace {

const tsc::SpecBundle& basic() {
  static const tsc::SpecBundle b = tsc::load_spec(testing_support::fixture("fig4c_phase2.tsc"));
  return b;
}

tsc::SpatialView& view_of(tsc::SequenceChart& c) { return c.nodes.at(0).view; }

std::vector<std::string> messages(const tsc::ChartViolations& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.message);
  return out;
}

TEST(Chart, ShippedChartsAreWellTyped) {
  const auto spec = tsc::load_spec(testing_support::kSpec);
  EXPECT_TRUE(tsc::validate_dictionary(spec.dictionary, spec.object_model).empty());
  for (const auto& [name, chart] : spec.charts)
    EXPECT_TRUE(tsc::well_typed(chart, spec.object_model, spec.dictionary).empty()) << name;
}

TEST(Chart, BasicChartViewHasExpectedElements) {
  const auto& v = basic().charts.at("phase2").nodes.at(0).view;
  EXPECT_EQ(v.placements.size(), 3u);
  ASSERT_EQ(v.distances.size(), 1u);
  EXPECT_EQ(v.distances[0].cmp, tsc::Comparator::GreaterEqual);
  EXPECT_EQ(v.distances[0].metres.symbol, "gap_trigger");
  EXPECT_DOUBLE_EQ(v.distances[0].metres.value, 25.0);
  ASSERT_EQ(v.nowhere.size(), 1u);
  EXPECT_EQ(v.nowhere[0].kind, "Car");
  ASSERT_NE(v.placement("ego"), nullptr);
  EXPECT_EQ(v.placement("ego")->symbol, "EgoCar");
}

TEST(Chart, UnknownSymbol) {
  auto chart = basic().charts.at("phase2");
  view_of(chart).placements[2].symbol = "Bus";
  EXPECT_EQ(messages(tsc::well_typed(chart, basic().object_model, basic().dictionary)),
            std::vector<std::string>{"unknown symbol Bus"});
}

TEST(Chart, DegenerateDistanceAndSelfOrdering) {
  auto chart = basic().charts.at("phase2");
  view_of(chart).distances[0].to.variable = "ego";
  view_of(chart).orderings[0].after = "ego";
  const auto m = messages(tsc::well_typed(chart, basic().object_model, basic().dictionary));
  EXPECT_NE(std::find(m.begin(), m.end(), "degenerate distance"), m.end());
  EXPECT_NE(std::find(m.begin(), m.end(), "ordering of an instance against itself"), m.end());
}

TEST(Chart, EqualityDistanceRejected) {
  auto chart = basic().charts.at("phase2");
  view_of(chart).distances[0].cmp = tsc::Comparator::Equal;
  EXPECT_EQ(messages(tsc::well_typed(chart, basic().object_model, basic().dictionary)),
            std::vector<std::string>{"distance lines need an inequality"});
}

TEST(Chart, AttributeConstraintTyping) {
  auto chart = basic().charts.at("phase2");
  auto& c = view_of(chart).constraints;
  c.clear();
  c.push_back({{tsc::AttrPath{"ego", "indicators_left"}, {}}, tsc::Comparator::Less, {std::nullopt, {1.0, ""}}});
  c.push_back({{tsc::AttrPath{"ego", "pos"}, {}}, tsc::Comparator::Less, {tsc::AttrPath{"other", "pos"}, {}}});
  c.push_back({{tsc::AttrPath{"ego", "speed"}, {}}, tsc::Comparator::Less, {std::nullopt, {1.0, ""}}});
  c.push_back({{std::nullopt, {1.0, ""}}, tsc::Comparator::Less, {std::nullopt, {2.0, ""}}});
  c.push_back({{tsc::AttrPath{"truck", "v"}, {}}, tsc::Comparator::Less, {std::nullopt, {1.0, ""}}});
  const auto v = tsc::well_typed(chart, basic().object_model, basic().dictionary);
  EXPECT_EQ(messages(v), (std::vector<std::string>{
                             "boolean attributes only support =",
                             "position attribute needs a component (.x or .y)",
                             "position attribute needs a component (.x or .y)",
                             "unknown attribute ego.speed",
                             "comparison between constants",
                             "unknown variable truck",
                         }));
  for (const auto& x : v) EXPECT_EQ(x.node, 0u);
}

TEST(Chart, EmptyChartAndUnknownAnchor) {
  tsc::SequenceChart empty;
  EXPECT_EQ(messages(tsc::well_typed(empty, basic().object_model, basic().dictionary)),
            std::vector<std::string>{"sequence chart without nodes"});
  auto chart = basic().charts.at("phase2");
  view_of(chart).somewhere[0].region.upper.anchor = "yX";
  EXPECT_EQ(messages(tsc::well_typed(chart, basic().object_model, basic().dictionary)),
            std::vector<std::string>{"unknown anchor lane.yX"});
}

TEST(Chart, DictionaryChecks) {
  auto dict = basic().dictionary;
  dict.entries["Ghost"] = {"Plane", {{"c", tsc::AnchorMode::Point, "pos"}}};
  dict.entries["Bad"] = {"Car", {{"c", tsc::AnchorMode::Point, "v"}, {"l", tsc::AnchorMode::LineFixedY, "pos"}}};
  const auto v = tsc::validate_dictionary(dict, basic().object_model);
  std::vector<std::string> m;
  for (const auto& x : v) m.push_back(x.message);
  EXPECT_EQ(m, (std::vector<std::string>{"point anchor must bind a position attribute",
                                         "line anchor must bind a real attribute", "unknown kind Plane"}));
}

TEST(Chart, ComparatorHelpers) {
  EXPECT_TRUE(tsc::compare(1.0, tsc::Comparator::LessEqual, 1.0));
  EXPECT_FALSE(tsc::compare(1.0, tsc::Comparator::Less, 1.0));
  for (auto c : {tsc::Comparator::Less, tsc::Comparator::LessEqual, tsc::Comparator::Greater,
                 tsc::Comparator::GreaterEqual, tsc::Comparator::Equal}) {
    EXPECT_EQ(tsc::mirrored(tsc::mirrored(c)), c);
    for (double a : {0.0, 1.0, 2.0})
      for (double b : {0.0, 1.0, 2.0}) EXPECT_EQ(tsc::compare(a, c, b), tsc::compare(b, tsc::mirrored(c), a));
  }
}

}  // namespace
