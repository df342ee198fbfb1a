#pragma once

#include "tsc/monitor.hpp"
#include "tsc/object_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tsc {

// Kinematic overtaking scenario on a two-lane road. Speeds are piecewise
// constant and positions follow in closed form; lateral moves are smoothstep
// ramps. Ego starts at x = 0 in the centre of the right lane, the other car
// `initial_gap` metres ahead.
struct ScenarioParams {
  double ego_speed = 15.0;
  double other_speed = 10.0;
  double initial_gap = 60.0;
  // Gap at which ego stops approaching and starts closing in.
  double gap_trigger = 25.0;
  // Ego speed while closing the gap and changing lanes.
  double follow_speed = 11.0;
  double follow_duration = 3.0;
  // Indicator time before a lateral move starts.
  double indicator_lead = 1.0;
  double lane_change_duration = 3.0;
  double lane_width = 3.5;
  // Lead over the other car at which ego signals its return.
  double return_gap = 15.0;
  double tail = 2.0;
  double sample_rate = 20.0;
  // When positive, the trace ends here instead of after the tail; motion
  // continues at the final speeds.
  double duration = 0.0;
  // Standard deviation of Gaussian noise on car positions.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

// Applies `key=value` overrides; throws ScenarioError for unknown keys or
// malformed numbers.
ScenarioParams parse_params(const std::vector<std::string>& overrides, ScenarioParams base = {});

// Throws ScenarioError when the parameters cannot produce the scenario.
void validate_params(const ScenarioParams& params);

std::size_t sample_count(double duration, double sample_rate);

// Approach, close in, change to the left lane, pass, return to the right.
Trace simulate_overtaking(const ScenarioParams& params);

// After closing in, ego swerves right past the road edge and passes on the right.
Trace simulate_right_pass(const ScenarioParams& params);

// Ego starts a lane change, brakes below the other car's speed, returns to the
// right lane and falls back to a safe distance.
Trace simulate_aborted_lane_change(const ScenarioParams& params);

// Ego slows to the other car's speed well behind it and follows.
Trace simulate_slow_down(const ScenarioParams& params);

// Samples with timestamp <= t_end.
Trace truncate_trace(const Trace& trace, double t_end);

// The default trace cut shortly after the closing-in phase begins.
Trace simulate_truncated(const ScenarioParams& params);

// "overtaking", "right_pass", "aborted_lane_change", "slow_down" or "truncated".
Trace simulate_fixture(const std::string& name, const ScenarioParams& params);
std::vector<std::string> fixture_names();

// Sampling bounds matching the scenario's object model: ego and other anywhere
// on a 150 m stretch of road, arbitrary speeds and indicators, an optional
// third car.
Bounds default_bounds(double lane_width = 3.5);

}  // namespace tsc
