#pragma once

#include "tsc/monitor.hpp"
#include "tsc/object_model.hpp"
#include "tsc/spec_parser.hpp"

#include <string>

namespace testing_support {

inline const std::string kSpec = std::string(TSC_DATA_DIR) + "/overtaking.tsc";

inline std::string fixture(const std::string& name) { return std::string(TSC_FIXTURE_DIR) + "/" + name; }

inline const tsc::CompiledBundle& shipped_bundle() {
  static const tsc::CompiledBundle bundle = tsc::compile_bundle(tsc::load_spec(kSpec));
  return bundle;
}

inline tsc::ObjectState car(double x, double y, double v, bool left = false, bool right = false) {
  return {"Car", {{"pos", tsc::Vec2{x, y}}, {"v", v}, {"indicators_left", left}, {"indicators_right", right}}};
}

inline tsc::ObjectState road(double lane_width = 3.5) {
  return {"DoubleLane", {{"pos", tsc::Vec2{0.0, 0.0}}, {"yR", 0.0}, {"yM", lane_width}, {"yL", 2.0 * lane_width}}};
}

// Two cars on a 3.5 m two-lane road.
inline tsc::ConcreteSituation situation(tsc::ObjectState ego, tsc::ObjectState other, double t = 0.0) {
  tsc::ConcreteSituation s;
  s.timestamp = t;
  s.objects["lane"] = road();
  s.objects["ego"] = std::move(ego);
  s.objects["other"] = std::move(other);
  return s;
}

}  // namespace testing_support
