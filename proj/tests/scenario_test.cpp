#include "support/situations.hpp"
#include "tsc/error.hpp"
#include "tsc/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

double x_of(const tsc::ConcreteSituation& s, const char* id) { return tsc::lookup_number(s, id, "pos.x"); }
double y_of(const tsc::ConcreteSituation& s, const char* id) { return tsc::lookup_number(s, id, "pos.y"); }

const tsc::ConcreteSituation& at(const tsc::Trace& trace, double t) {
  const auto i = static_cast<std::size_t>(std::llround(t * trace.sample_rate));
  EXPECT_NEAR(trace.samples.at(i).timestamp, t, 1e-9);
  return trace.samples.at(i);
}

TEST(Scenario, SampleCount) {
  EXPECT_EQ(tsc::sample_count(0.0, 20.0), 1u);
  EXPECT_EQ(tsc::sample_count(60.0, 20.0), 1201u);
  EXPECT_EQ(tsc::sample_count(7.2, 20.0), 145u);
  EXPECT_THROW(tsc::sample_count(1.0, 0.0), tsc::ScenarioError);
  tsc::ScenarioParams p;
  p.duration = 60.0;
  EXPECT_EQ(tsc::simulate_overtaking(p).samples.size(), 1201u);
}

TEST(Scenario, DefaultTimeline) {
  const auto trace = tsc::simulate_overtaking({});
  // 15 m/s until the gap is 25 m: (60 - 25) / (15 - 10) = 7 s.
  EXPECT_NEAR(x_of(at(trace, 7.0), "ego"), 105.0, 1e-6);
  EXPECT_NEAR(x_of(at(trace, 7.0), "other") - x_of(at(trace, 7.0), "ego"), 25.0, 1e-6);
  // 11 m/s for the next 7 s.
  EXPECT_NEAR(x_of(at(trace, 14.0), "ego"), 105.0 + 7 * 11.0, 1e-6);
  EXPECT_NEAR(x_of(at(trace, 14.0), "other"), 200.0, 1e-6);
  EXPECT_DOUBLE_EQ(tsc::lookup_number(at(trace, 13.0), "ego", "v"), 11.0);
  EXPECT_DOUBLE_EQ(tsc::lookup_number(at(trace, 14.0), "ego", "v"), 15.0);
  // Indicator from 10 s, lateral move from 11 s to 14 s.
  EXPECT_EQ(tsc::lookup(at(trace, 9.95), "ego", "indicators_left"), tsc::Value{false});
  EXPECT_EQ(tsc::lookup(at(trace, 10.0), "ego", "indicators_left"), tsc::Value{true});
  EXPECT_EQ(tsc::lookup(at(trace, 14.0), "ego", "indicators_left"), tsc::Value{false});
  EXPECT_DOUBLE_EQ(y_of(at(trace, 11.0), "ego"), 1.75);
  EXPECT_NEAR(y_of(at(trace, 12.5), "ego"), 3.5, 1e-9);
  EXPECT_DOUBLE_EQ(y_of(at(trace, 14.0), "ego"), 5.25);
  // Gap at 14 s is 18 m; ego signals its return 15 m ahead: 14 + 33 / 5 = 20.6 s.
  EXPECT_EQ(tsc::lookup(at(trace, 20.55), "ego", "indicators_right"), tsc::Value{false});
  EXPECT_EQ(tsc::lookup(at(trace, 20.6), "ego", "indicators_right"), tsc::Value{true});
  EXPECT_DOUBLE_EQ(y_of(trace.samples.back(), "ego"), 1.75);
  EXPECT_NEAR(trace.samples.back().timestamp, 20.6 + 1 + 3 + 2, 1e-9);
}

TEST(Scenario, KinematicsAreConsistent) {
  for (const auto& name : tsc::fixture_names()) {
    const auto trace = tsc::simulate_fixture(name, {});
    const double dt = 1.0 / trace.sample_rate;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
      const auto& a = trace.samples[i - 1];
      const auto& b = trace.samples[i];
      ASSERT_NEAR(b.timestamp - a.timestamp, dt, 1e-9);
      ASSERT_NEAR(x_of(b, "other") - x_of(a, "other"), 10.0 * dt, 1e-6);
      // Piecewise-constant speed: the displacement lies between the speeds at both ends.
      const double va = tsc::lookup_number(a, "ego", "v"), vb = tsc::lookup_number(b, "ego", "v");
      const double dx = x_of(b, "ego") - x_of(a, "ego");
      ASSERT_GE(dx, std::min(va, vb) * dt - 1e-6) << name << " " << i;
      ASSERT_LE(dx, std::max(va, vb) * dt + 1e-6) << name << " " << i;
    }
    EXPECT_TRUE(tsc::validate_trace(testing_support::shipped_bundle().object_model, trace).empty()) << name;
  }
}

TEST(Scenario, FixtureShapes) {
  const auto right = tsc::simulate_right_pass({});
  EXPECT_NEAR(y_of(right.samples.back(), "ego"), -1.75, 1e-9);
  EXPECT_GT(x_of(right.samples.back(), "ego"), x_of(right.samples.back(), "other"));
  const auto aborted = tsc::simulate_aborted_lane_change({});
  double max_y = 0.0;
  for (const auto& s : aborted.samples) max_y = std::max(max_y, y_of(s, "ego"));
  EXPECT_NEAR(max_y, 0.9 * 3.5, 1e-9);
  EXPECT_GE(x_of(aborted.samples.back(), "other") - x_of(aborted.samples.back(), "ego"), 30.0 - 1e-6);
  const auto slow = tsc::simulate_slow_down({});
  EXPECT_NEAR(x_of(slow.samples.back(), "other") - x_of(slow.samples.back(), "ego"), 40.0, 1e-6);
  const auto cut = tsc::simulate_truncated({});
  EXPECT_NEAR(cut.samples.back().timestamp, 7.2, 1e-9);
}

TEST(Scenario, DeterministicAndSeeded) {
  tsc::ScenarioParams p;
  p.noise = 0.2;
  p.seed = 42;
  const auto a = tsc::simulate_overtaking(p), b = tsc::simulate_overtaking(p);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(a.samples[i], b.samples[i]);
  p.seed = 43;
  const auto c = tsc::simulate_overtaking(p);
  EXPECT_NE(a.samples[10], c.samples[10]);
  const auto clean = tsc::simulate_overtaking({});
  EXPECT_NE(a.samples[10], clean.samples[10]);
}

TEST(Scenario, ParseParams) {
  const auto p = tsc::parse_params({"ego_speed=18", "seed=7", "duration=60"});
  EXPECT_DOUBLE_EQ(p.ego_speed, 18.0);
  EXPECT_EQ(p.seed, 7u);
  EXPECT_DOUBLE_EQ(p.duration, 60.0);
  EXPECT_DOUBLE_EQ(p.other_speed, 10.0);
  EXPECT_THROW(tsc::parse_params({"warp=9"}), tsc::ScenarioError);
  EXPECT_THROW(tsc::parse_params({"ego_speed"}), tsc::ScenarioError);
  EXPECT_THROW(tsc::parse_params({"ego_speed=fast"}), tsc::ScenarioError);
  EXPECT_THROW(tsc::parse_params({"ego_speed="}), tsc::ScenarioError);
  EXPECT_THROW(tsc::parse_params({"seed=-1"}), tsc::ScenarioError);
}

TEST(Scenario, InfeasibleParameters) {
  auto expect_infeasible = [](std::vector<std::string> overrides) {
    EXPECT_THROW(tsc::simulate_overtaking(tsc::parse_params(overrides)), tsc::ScenarioError)
        << overrides.front();
  };
  expect_infeasible({"ego_speed=9"});
  expect_infeasible({"initial_gap=20"});
  expect_infeasible({"follow_speed=10"});
  expect_infeasible({"sample_rate=0"});
  expect_infeasible({"lane_width=-1"});
  expect_infeasible({"follow_duration=22"});
  EXPECT_THROW(tsc::simulate_aborted_lane_change(tsc::parse_params({"other_speed=5", "follow_speed=6",
                                                                    "ego_speed=7"})),
               tsc::ScenarioError);
  EXPECT_THROW(tsc::simulate_slow_down(tsc::parse_params({"initial_gap=35"})), tsc::ScenarioError);
  EXPECT_THROW(tsc::simulate_fixture("nonsense", {}), tsc::ScenarioError);
}

TEST(Scenario, DefaultBoundsMatchModel) {
  const auto b = tsc::default_bounds(4.0);
  ASSERT_EQ(b.objects.size(), 4u);
  EXPECT_EQ(b.objects[0].attrs.at("yL"), tsc::AttributeBounds{tsc::Value{8.0}});
  const auto& pos = std::get<tsc::PositionRange>(b.objects[1].attrs.at("pos"));
  EXPECT_DOUBLE_EQ(pos.y.hi, 10.0);
}

}  // namespace
