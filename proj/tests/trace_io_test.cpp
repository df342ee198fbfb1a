#include "support/situations.hpp"
#include "tsc/error.hpp"
#include "tsc/scenario.hpp"
#include "tsc/trace_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using testing_support::car;
using testing_support::situation;

void expect_equal_traces(const tsc::Trace& a, const tsc::Trace& b) {
  EXPECT_DOUBLE_EQ(a.sample_rate, b.sample_rate);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples[i];
    ASSERT_NEAR(x.timestamp, y.timestamp, 1e-9);
    ASSERT_EQ(x.objects.size(), y.objects.size());
    for (const auto& [id, obj] : x.objects) {
      const auto& other = y.objects.at(id);
      ASSERT_EQ(obj.kind, other.kind);
      ASSERT_EQ(obj.attrs.size(), other.attrs.size());
      for (const auto& [name, value] : obj.attrs) {
        const auto& v = other.attrs.at(name);
        ASSERT_EQ(value.index(), v.index()) << id << "." << name;
        if (const auto* p = std::get_if<tsc::Vec2>(&value)) {
          ASSERT_NEAR(p->x, std::get<tsc::Vec2>(v).x, 1e-9);
          ASSERT_NEAR(p->y, std::get<tsc::Vec2>(v).y, 1e-9);
        } else if (const auto* d = std::get_if<double>(&value)) {
          ASSERT_NEAR(*d, std::get<double>(v), 1e-9);
        } else {
          ASSERT_EQ(value, v);
        }
      }
    }
  }
}

tsc::Trace read(const std::string& text) {
  std::istringstream in(text);
  return tsc::read_trace(in);
}

TEST(TraceIo, DefaultScenarioRoundTrip) {
  const auto trace = tsc::simulate_overtaking({});
  std::ostringstream out;
  tsc::write_trace(out, trace);
  expect_equal_traces(read(out.str()), trace);
}

TEST(TraceIo, NoisyRoundTripIsExact) {
  tsc::ScenarioParams p;
  p.noise = 0.3;
  p.seed = 5;
  const auto trace = tsc::simulate_overtaking(p);
  std::ostringstream out;
  tsc::write_trace(out, trace);
  const auto back = read(out.str());
  ASSERT_EQ(back.samples.size(), trace.samples.size());
  for (std::size_t i = 0; i < trace.samples.size(); ++i) ASSERT_EQ(back.samples[i], trace.samples[i]);
}

TEST(TraceIo, ShippedTracesMatchGenerators) {
  for (const auto& name : tsc::fixture_names()) {
    const auto shipped = tsc::read_trace(std::string(TSC_DATA_DIR) + "/traces/" + name + ".ndjson");
    expect_equal_traces(shipped, tsc::simulate_fixture(name, {}));
  }
}

TEST(TraceIo, SituationJson) {
  const auto s = situation(car(1.5, 1.75, 15, true), car(27, 1.75, 10), 0.25);
  const auto text = tsc::situation_to_json(s);
  EXPECT_NE(text.find("\"t\":0.25"), std::string::npos);
  EXPECT_NE(text.find("\"indicators_left\":true"), std::string::npos);
  EXPECT_EQ(read(text + "\n").samples.at(0), s);
}

TEST(TraceIo, RejectsNonMonotoneTime) {
  const auto a = tsc::situation_to_json(situation(car(0, 1, 1), car(9, 1, 1), 0.1));
  const auto b = tsc::situation_to_json(situation(car(0, 1, 1), car(9, 1, 1), 0.05));
  try {
    read(a + "\n" + b + "\n");
    FAIL();
  } catch (const tsc::TraceFormatError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("non-monotone t"), std::string::npos);
  }
}

TEST(TraceIo, RejectsMissingKind) {
  try {
    read("{\"t\":0.0,\"objects\":[{\"id\":\"ego\",\"attrs\":{}}]}\n");
    FAIL();
  } catch (const tsc::TraceFormatError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("object 0 lacks \"kind\""), std::string::npos) << e.what();
  }
}

TEST(TraceIo, RejectsMalformedInput) {
  EXPECT_THROW(read("{not json\n"), tsc::TraceFormatError);
  EXPECT_THROW(read("{\"objects\":[]}\n"), tsc::TraceFormatError);
  EXPECT_THROW(read("{\"t\":0,\"objects\":[{\"id\":\"a\",\"kind\":\"Car\",\"attrs\":{}},"
                    "{\"id\":\"a\",\"kind\":\"Car\",\"attrs\":{}}]}\n"),
               tsc::TraceFormatError);
  EXPECT_THROW(tsc::read_trace("/nonexistent/trace.ndjson"), tsc::Error);
}

TEST(TraceIo, SampleRateFromSpacing) {
  std::string text;
  for (int i = 0; i < 5; ++i)
    text += tsc::situation_to_json(situation(car(0, 1, 1), car(9, 1, 1), i * 0.1)) + "\n";
  EXPECT_DOUBLE_EQ(read(text).sample_rate, 10.0);
}

}  // namespace
