#include "support/oracle.hpp"
#include "support/situations.hpp"
#include "tsc/error.hpp"
#include "tsc/formula.hpp"
#include "tsc/scenario.hpp"
#include "tsc/spec_parser.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

namespace {

using testing_support::car;
using testing_support::situation;

const tsc::CompiledBundle& basic() {
  static const tsc::CompiledBundle b = tsc::compile_bundle(tsc::load_spec(testing_support::fixture("fig4c_phase2.tsc")));
  return b;
}

const std::map<std::string, double> kConstants{{"gap_trigger", 25.0}, {"safe_dist", 30.0}};

tsc::Formula parse_one(const std::string& text) {
  auto seq = tsc::parse_formula_sequence(text, kConstants);
  EXPECT_EQ(seq.nodes.size(), 1u);
  return seq.nodes.at(0);
}

const char* const kBasicChartFormula =
    "ego.pos.y > lane.yR && ego.pos.y < lane.yM && other.pos.y > lane.yR && other.pos.y < lane.yM "
    "ego.pos.x + 25 <= other.pos.x  ego.v > other.v  ego.inRange(left) = {}";

TEST(Compile, BasicChartGivesFiveConjuncts) {
  const tsc::Formula& f = basic().context("phase2");
  ASSERT_EQ(f.conjuncts.size(), 5u);
  EXPECT_TRUE(tsc::same_conjuncts(f, parse_one(kBasicChartFormula)));
  EXPECT_EQ(f.kinds.at("ego"), "Car");
  EXPECT_EQ(f.kinds.at("lane"), "DoubleLane");
}

TEST(Compile, BasicChartEvaluation) {
  const tsc::Formula& f = basic().context("phase2");
  EXPECT_TRUE(tsc::evaluate_formula(f, situation(car(0, 1.75, 15), car(27, 1.75, 10))));
  EXPECT_FALSE(tsc::evaluate_formula(f, situation(car(0, 1.75, 15), car(20, 1.75, 10))));
  // Boundary of the non-strict distance.
  EXPECT_TRUE(tsc::evaluate_formula(f, situation(car(0, 1.75, 15), car(25, 1.75, 10))));
  auto blocked = situation(car(0, 1.75, 15), car(27, 1.75, 10));
  blocked.objects["car3"] = car(10, 5.25, 10);
  EXPECT_FALSE(tsc::evaluate_formula(f, blocked));
}

TEST(Compile, EmptyViewIsTrue) {
  tsc::SpatialView view;
  view.placements.push_back({"EgoCar", "ego"});
  const auto spec = tsc::load_spec(testing_support::kSpec);
  const auto f = tsc::compile_spatial_view(view, spec.object_model, spec.dictionary);
  EXPECT_TRUE(f.conjuncts.empty());
  EXPECT_TRUE(tsc::evaluate_formula(f, situation(car(0, 1.75, 15), car(27, 1.75, 10))));
  EXPECT_TRUE(tsc::evaluate_formula(tsc::Formula{}, tsc::ConcreteSituation{}));
}

TEST(Compile, SingleNodeChart) {
  const auto spec = tsc::load_spec(testing_support::fixture("fig4c_phase2.tsc"));
  const auto seq = tsc::compile_sequence_chart(spec.charts.at("phase2"), spec.object_model, spec.dictionary);
  EXPECT_EQ(seq.nodes.size(), 1u);
}

TEST(Compile, IllTypedNodeThrowsWithIndex) {
  auto spec = tsc::load_spec(testing_support::kSpec);
  auto chart = spec.charts.at("lane_change_left");
  chart.nodes[1].view.placements[2].symbol = "Bus";
  try {
    tsc::compile_sequence_chart(chart, spec.object_model, spec.dictionary);
    FAIL() << "expected CompileError";
  } catch (const tsc::CompileError& e) {
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos) << e.what();
  }
}

class GoldenTest : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldenTest, CompiledChartMatchesGolden) {
  const auto& bundle = testing_support::shipped_bundle();
  const auto golden = tsc::parse_formula_sequence(
      [&] {
        std::ifstream in(std::string(TSC_DATA_DIR) + "/golden/" + GetParam() + ".txt");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
      }(),
      kConstants);
  const auto& compiled = bundle.chart(GetParam());
  ASSERT_EQ(compiled.nodes.size(), golden.nodes.size());
  for (std::size_t i = 0; i < golden.nodes.size(); ++i)
    EXPECT_TRUE(tsc::same_conjuncts(compiled.nodes[i], golden.nodes[i]))
        << "node " << i + 1 << "\ncompiled:\n"
        << tsc::to_text(tsc::normalize(compiled.nodes[i])) << "\ngolden:\n"
        << tsc::to_text(tsc::normalize(golden.nodes[i]));
}

// Truth agreement between the compiled charts and an evaluator that reads the
// golden text directly.
TEST_P(GoldenTest, CompiledChartAgreesWithGoldenOracle) {
  const auto& bundle = testing_support::shipped_bundle();
  const auto oracle = oracle::Golden::load(std::string(TSC_DATA_DIR) + "/golden/" + GetParam() + ".txt");
  const auto& compiled = bundle.chart(GetParam());
  ASSERT_EQ(compiled.nodes.size(), oracle.size());
  const auto bounds = tsc::default_bounds();
  std::mt19937_64 rng(7);
  std::size_t positives = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = tsc::sample_situation(bounds, rng);
    for (std::size_t n = 0; n < oracle.size(); ++n) {
      const bool expected = oracle.holds(n, s);
      positives += expected;
      ASSERT_EQ(tsc::evaluate_formula(compiled.nodes[n], s), expected)
          << GetParam() << " node " << n + 1 << " at sample " << i;
    }
  }
  EXPECT_GT(positives, 0u) << "bounds never satisfy " << GetParam();
}

INSTANTIATE_TEST_SUITE_P(Shipped, GoldenTest,
                         ::testing::Values("S1", "S2", "S3", "S4", "lane_change_left", "slow_down_behind",
                                           "right_pass", "complete_pass", "abort_lane_change", "return_right",
                                           "abort_overtake"));

TEST(Normalize, FlipsGreaterIntoLess) {
  const auto f = tsc::normalize(parse_one("other.pos.x > ego.pos.x + 25"));
  EXPECT_EQ(tsc::to_text(f), "ego.pos.x + 25 < other.pos.x\n");
  EXPECT_EQ(tsc::to_text(tsc::normalize(parse_one("other.pos.x >= ego.pos.x + 25"))),
            "ego.pos.x + 25 <= other.pos.x\n");
}

TEST(Normalize, FoldsConstantsAndDeduplicates) {
  const auto f = tsc::normalize(parse_one("ego.pos.x + 10 < other.pos.x + 4  ego.pos.x + 6 < other.pos.x"));
  EXPECT_EQ(tsc::to_text(f), "ego.pos.x + 6 < other.pos.x\n");
}

TEST(Normalize, IsIdempotentOnShippedCharts) {
  for (const auto& [name, seq] : testing_support::shipped_bundle().charts)
    for (const auto& node : seq.nodes) {
      const auto once = tsc::normalize(node);
      const auto twice = tsc::normalize(once);
      EXPECT_EQ(tsc::to_text(once), tsc::to_text(twice)) << name;
      EXPECT_EQ(once.conjuncts, twice.conjuncts) << name;
    }
}

TEST(Normalize, PreservesTruth) {
  const auto bounds = tsc::default_bounds();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto s = tsc::sample_situation(bounds, rng);
    for (const auto& [name, seq] : testing_support::shipped_bundle().charts)
      for (const auto& node : seq.nodes)
        ASSERT_EQ(tsc::evaluate_formula(node, s), tsc::evaluate_formula(tsc::normalize(node), s)) << name;
  }
}

TEST(Normalize, PhaseThreeMatchesHandEnteredFormula) {
  const auto hand = parse_one(
      "lane.yR < ego.pos.y  ego.pos.y < lane.yL  lane.yR < other.pos.y  other.pos.y < lane.yM "
      "ego.pos.x < other.pos.x  ego.indicators_left = 1");
  EXPECT_TRUE(tsc::same_conjuncts(testing_support::shipped_bundle().context("S3"), hand));
}

TEST(Evaluate, UnbindableVariableIsFalse) {
  const auto& f = basic().context("phase2");
  tsc::ConcreteSituation lone;
  lone.objects["lane"] = testing_support::road();
  lone.objects["ego"] = car(0, 1.75, 15);
  EXPECT_THROW(tsc::bind_variables(f, lone), tsc::BindingError);
  EXPECT_FALSE(tsc::evaluate_formula(f, lone));
}

TEST(Evaluate, BindsByIdentityThenNearestAhead) {
  const auto& f = basic().context("phase2");
  tsc::ConcreteSituation s;
  s.objects["road"] = testing_support::road();
  s.objects["ego"] = car(0, 1.75, 15);
  s.objects["far"] = car(80, 1.75, 10);
  s.objects["near"] = car(30, 1.75, 10);
  s.objects["behind"] = car(-5, 1.75, 10);
  const auto binding = tsc::bind_variables(f, s);
  EXPECT_EQ(binding.at("lane"), "road");
  EXPECT_EQ(binding.at("ego"), "ego");
  EXPECT_EQ(binding.at("other"), "near");
  EXPECT_TRUE(tsc::evaluate_formula(f, s));
}

TEST(Evaluate, TextRendering) {
  EXPECT_EQ(tsc::format_number(25.0), "25");
  EXPECT_EQ(tsc::format_number(0.5), "0.5");
  const auto seq = tsc::parse_formula_sequence("ego.v > other.v; ego.v <= other.v");
  EXPECT_EQ(tsc::to_text(seq), "ego.v > other.v\n;\nego.v <= other.v\n");
}

}  // namespace
