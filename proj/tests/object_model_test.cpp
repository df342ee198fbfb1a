#include "support/situations.hpp"
#include "tsc/error.hpp"
#include "tsc/object_model.hpp"
#include "tsc/spec_parser.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using testing_support::car;
using testing_support::situation;

const tsc::ObjectModel& model() { return testing_support::shipped_bundle().object_model; }

TEST(ObjectModel, ShippedModelIsValid) {
  EXPECT_TRUE(tsc::validate_object_model(model()).empty());
  ASSERT_NE(model().kind("Car"), nullptr);
  EXPECT_EQ(model().path_type("Car", "pos.x"), tsc::ScalarType::Real);
  EXPECT_EQ(model().path_type("Car", "pos"), tsc::ScalarType::Position);
  EXPECT_EQ(model().path_type("Car", "indicators_left"), tsc::ScalarType::Boolean);
  EXPECT_FALSE(model().path_type("Car", "pos.z"));
  EXPECT_FALSE(model().path_type("Truck", "v"));
}

TEST(ObjectModel, DetectsDuplicatesAndUnknownTypes) {
  tsc::ObjectModel om;
  om.kinds.push_back({"Car", {{"v", "real", ""}, {"v", "real", ""}, {"w", "float", ""}}});
  om.enums.push_back({"Side", {}});
  const auto v = tsc::validate_object_model(om);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].message, "enumeration without literals");
  EXPECT_EQ(v[1].message, "duplicate attribute");
  EXPECT_EQ(v[2].message, "unknown type float");
}

TEST(ObjectModel, ValidSituationPassesAndLookupWorks) {
  const auto s = situation(car(0, 1.75, 15), car(27, 1.75, 10));
  EXPECT_TRUE(tsc::validate_situation(model(), s).empty());
  EXPECT_DOUBLE_EQ(tsc::lookup_number(s, "other", "pos.x"), 27.0);
  EXPECT_DOUBLE_EQ(tsc::lookup_number(s, "lane", "yM"), 3.5);
  EXPECT_DOUBLE_EQ(tsc::lookup_number(s, "ego", "indicators_left"), 0.0);
}

TEST(ObjectModel, LookupThrowsOnUnknownIdentityOrAttribute) {
  const auto s = situation(car(0, 1.75, 15), car(27, 1.75, 10));
  EXPECT_THROW(tsc::lookup(s, "truck", "v"), tsc::LookupError);
  EXPECT_THROW(tsc::lookup(s, "ego", "colour"), tsc::LookupError);
  EXPECT_THROW(tsc::lookup(s, "ego", "pos.z"), tsc::LookupError);
  EXPECT_THROW(tsc::lookup(s, "ego", "v.x"), tsc::LookupError);
}

TEST(ObjectModel, SituationViolationsAreReportedNotThrown) {
  auto s = situation(car(0, 1.75, 15), car(27, 1.75, 10));
  s.objects["ego"].attrs.erase("v");
  s.objects["other"].attrs["v"] = true;
  s.objects["other"].attrs["colour"] = std::string("red");
  s.objects["truck"] = {"Truck", {}};
  const auto v = tsc::validate_situation(model(), s);
  std::vector<std::string> messages;
  for (const auto& x : v) messages.push_back(x.message);
  EXPECT_EQ(messages, (std::vector<std::string>{"missing attribute ego.v", "type mismatch other.v",
                                                "unknown attribute other.colour", "unknown kind Truck"}));
}

TEST(ObjectModel, RejectsNonFiniteValues) {
  auto s = situation(car(0, NAN, 15), car(27, 1.75, INFINITY));
  const auto v = tsc::validate_situation(model(), s);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].message, "non-finite position ego.pos");
  EXPECT_EQ(v[1].message, "non-finite real other.v");
}

TEST(ObjectModel, TraceNeedsIncreasingTimestamps) {
  tsc::Trace t;
  t.sample_rate = 20.0;
  t.samples = {situation(car(0, 1, 1), car(9, 1, 1), 0.0), situation(car(0, 1, 1), car(9, 1, 1), 0.05),
               situation(car(0, 1, 1), car(9, 1, 1), 0.05), situation(car(0, 1, 1), car(9, 1, 1), 0.2)};
  const auto v = tsc::validate_trace(model(), t);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].message, "non-monotone t");
  EXPECT_EQ(v[1].message, "sample spacing outside tolerance");
}

TEST(InRange, FindsCarsInTheAdjacentLaneOnly) {
  auto s = situation(car(0, 1.75, 15), car(27, 1.75, 10));
  EXPECT_TRUE(tsc::in_range(s, "ego", tsc::Side::Left).empty());
  s.objects["car3"] = car(40, 5.25, 20);
  EXPECT_EQ(tsc::in_range(s, "ego", tsc::Side::Left), std::vector<std::string>{"car3"});
  EXPECT_TRUE(tsc::in_range(s, "ego", tsc::Side::Left, 30.0).empty());
  // Ego in the right lane has no lane to its right.
  EXPECT_TRUE(tsc::in_range(s, "ego", tsc::Side::Right).empty());
  s.objects["ego"] = car(30, 5.25, 15);
  EXPECT_EQ(tsc::in_range(s, "ego", tsc::Side::Right), std::vector<std::string>{"other"});
  EXPECT_TRUE(tsc::in_range(s, "ego", tsc::Side::Left).empty());
}

TEST(InRange, NeedsExactlyOneLaneObject) {
  auto s = situation(car(0, 1.75, 15), car(27, 1.75, 10));
  s.objects["lane2"] = testing_support::road();
  EXPECT_THROW(tsc::in_range(s, "ego", tsc::Side::Left), tsc::LookupError);
  s.objects.erase("lane2");
  s.objects.erase("lane");
  EXPECT_THROW(tsc::in_range(s, "ego", tsc::Side::Left), tsc::LookupError);
}

TEST(Value, NumericViewAndDescription) {
  EXPECT_DOUBLE_EQ(tsc::as_number(tsc::Value{true}), 1.0);
  EXPECT_DOUBLE_EQ(tsc::as_number(tsc::Value{std::int64_t{3}}), 3.0);
  EXPECT_THROW(tsc::as_number(tsc::Value{tsc::Vec2{1, 2}}), tsc::EvalError);
  EXPECT_THROW(tsc::as_number(tsc::Value{std::string("left")}), tsc::EvalError);
  EXPECT_EQ(tsc::parse_side("left"), tsc::Side::Left);
  EXPECT_FALSE(tsc::parse_side("up"));
}

}  // namespace
