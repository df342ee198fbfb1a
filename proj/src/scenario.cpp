#include "tsc/scenario.hpp"

#include "tsc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <random>

namespace tsc {

namespace {

// Piecewise constant speed with closed-form position.
class SpeedProfile {
 public:
  SpeedProfile(double x0, double v0) { segments_.push_back({0.0, x0, v0}); }

  void set_speed(double t, double v) {
    const Segment& last = segments_.back();
    if (t < last.t0) throw ScenarioError("speed changes out of order");
    segments_.push_back({t, last.x0 + last.v * (t - last.t0), v});
  }

  double position(double t) const { return segment(t).x0 + segment(t).v * (t - segment(t).t0); }
  double speed(double t) const { return segment(t).v; }

  // First time >= from at which position reaches x (speed must be positive there).
  double time_at(double x, double from) const {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      const double end = i + 1 < segments_.size() ? segments_[i + 1].t0 : INFINITY;
      if (end < from || s.v <= 0.0) continue;
      const double t = s.t0 + (x - s.x0) / s.v;
      if (t >= std::max(from, s.t0) && t <= end) return t;
    }
    throw ScenarioError("position never reached");
  }

 private:
  struct Segment {
    double t0;
    double x0;
    double v;
  };

  const Segment& segment(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double value, const Segment& s) { return value < s.t0; });
    return *std::prev(it);
  }

  std::vector<Segment> segments_;
};

struct Ramp {
  double t0;
  double t1;
  double y0;
  double y1;
};

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

// Lateral position: constant between ramps, smoothstep across each ramp.
double lateral(const std::vector<Ramp>& ramps, double y_start, double t) {
  double y = y_start;
  for (const auto& r : ramps) {
    if (t <= r.t0) break;
    if (t >= r.t1) {
      y = r.y1;
      continue;
    }
    return r.y0 + (r.y1 - r.y0) * smoothstep((t - r.t0) / (r.t1 - r.t0));
  }
  return y;
}

struct Interval {
  double begin;
  double end;
};

bool inside(const std::vector<Interval>& intervals, double t) {
  return std::any_of(intervals.begin(), intervals.end(), [&](const Interval& i) { return t >= i.begin && t < i.end; });
}

struct EgoPlan {
  SpeedProfile speed;
  std::vector<Ramp> ramps;
  std::vector<Interval> left_indicator;
  std::vector<Interval> right_indicator;
  double end = 0.0;
};

ObjectState car(double x, double y, double v, bool left, bool right) {
  ObjectState s;
  s.kind = "Car";
  s.attrs["pos"] = Vec2{x, y};
  s.attrs["v"] = v;
  s.attrs["indicators_left"] = left;
  s.attrs["indicators_right"] = right;
  return s;
}

Trace render(const ScenarioParams& p, const EgoPlan& plan) {
  const double w = p.lane_width;
  const double end = p.duration > 0.0 ? p.duration : plan.end;
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, p.noise > 0.0 ? p.noise : 1.0);
  auto jitter = [&] { return p.noise > 0.0 ? noise(rng) : 0.0; };

  ObjectState lane;
  lane.kind = "DoubleLane";
  lane.attrs["pos"] = Vec2{0.0, 0.0};
  lane.attrs["yR"] = 0.0;
  lane.attrs["yM"] = w;
  lane.attrs["yL"] = 2.0 * w;

  Trace trace;
  trace.sample_rate = p.sample_rate;
  const std::size_t n = sample_count(end, p.sample_rate);
  trace.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    ConcreteSituation sigma;
    sigma.timestamp = t;
    sigma.objects["lane"] = lane;
    const double ex = plan.speed.position(t) + jitter();
    const double ey = lateral(plan.ramps, w / 2.0, t) + jitter();
    sigma.objects["ego"] = car(ex, ey, plan.speed.speed(t), inside(plan.left_indicator, t),
                               inside(plan.right_indicator, t));
    const double ox = p.initial_gap + p.other_speed * t + jitter();
    const double oy = w / 2.0 + jitter();
    sigma.objects["other"] = car(ox, oy, p.other_speed, false, false);
    trace.samples.push_back(std::move(sigma));
  }
  return trace;
}

// Time at which the gap (other.x - ego.x) has closed to gap_trigger.
double trigger_time(const ScenarioParams& p) { return (p.initial_gap - p.gap_trigger) / (p.ego_speed - p.other_speed); }

double gap_at(const ScenarioParams& p, const SpeedProfile& ego, double t) {
  return p.initial_gap + p.other_speed * t - ego.position(t);
}

// Approach and close in; returns the time at which closing in ends.
double approach(const ScenarioParams& p, EgoPlan& plan) {
  const double t1 = trigger_time(p);
  plan.speed.set_speed(t1, p.follow_speed);
  return t1 + p.follow_duration;
}

}  // namespace

ScenarioParams parse_params(const std::vector<std::string>& overrides, ScenarioParams base) {
  const std::map<std::string, double ScenarioParams::*> fields = {
      {"ego_speed", &ScenarioParams::ego_speed},
      {"other_speed", &ScenarioParams::other_speed},
      {"initial_gap", &ScenarioParams::initial_gap},
      {"gap_trigger", &ScenarioParams::gap_trigger},
      {"follow_speed", &ScenarioParams::follow_speed},
      {"follow_duration", &ScenarioParams::follow_duration},
      {"indicator_lead", &ScenarioParams::indicator_lead},
      {"lane_change_duration", &ScenarioParams::lane_change_duration},
      {"lane_width", &ScenarioParams::lane_width},
      {"return_gap", &ScenarioParams::return_gap},
      {"tail", &ScenarioParams::tail},
      {"sample_rate", &ScenarioParams::sample_rate},
      {"duration", &ScenarioParams::duration},
      {"noise", &ScenarioParams::noise},
  };
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ScenarioError("expected key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (key == "seed") {
      std::uint64_t seed = 0;
      auto res = std::from_chars(first, last, seed);
      if (res.ec != std::errc() || res.ptr != last) throw ScenarioError("malformed seed '" + value + "'");
      base.seed = seed;
      continue;
    }
    auto it = fields.find(key);
    if (it == fields.end()) throw ScenarioError("unknown scenario parameter " + key);
    double v = 0.0;
    auto res = std::from_chars(first, last, v);
    if (value.empty() || res.ec != std::errc() || res.ptr != last)
      throw ScenarioError("malformed value for " + key + ": '" + value + "'");
    base.*(it->second) = v;
  }
  return base;
}

void validate_params(const ScenarioParams& p) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ScenarioError("infeasible scenario: " + what);
  };
  require(p.sample_rate > 0.0, "sample_rate must be positive");
  require(p.other_speed >= 0.0, "other_speed must be non-negative");
  require(p.ego_speed > p.other_speed, "ego_speed must exceed other_speed");
  require(p.initial_gap > p.gap_trigger, "initial_gap must exceed gap_trigger");
  require(p.gap_trigger > 0.0, "gap_trigger must be positive");
  require(p.follow_speed > p.other_speed, "follow_speed must exceed other_speed");
  require(p.follow_duration >= 0.0 && p.indicator_lead >= 0.0 && p.tail >= 0.0, "durations must be non-negative");
  require(p.lane_change_duration > 0.0, "lane_change_duration must be positive");
  require(p.lane_width > 0.0, "lane_width must be positive");
  require(p.return_gap >= 0.0, "return_gap must be non-negative");
  require(p.noise >= 0.0, "noise must be non-negative");
  require(p.duration >= 0.0, "duration must be non-negative");
  const double closing = (p.follow_speed - p.other_speed) *
                         (p.follow_duration + p.indicator_lead + p.lane_change_duration);
  require(p.gap_trigger - closing > 0.0, "gap closes before the lane change completes");
}

std::size_t sample_count(double duration, double sample_rate) {
  if (!(duration >= 0.0) || !(sample_rate > 0.0)) throw ScenarioError("invalid duration or sample rate");
  return static_cast<std::size_t>(std::floor(duration * sample_rate + 1e-9)) + 1;
}

Trace simulate_overtaking(const ScenarioParams& p) {
  validate_params(p);
  const double w = p.lane_width;
  EgoPlan plan{SpeedProfile(0.0, p.ego_speed), {}, {}, {}, 0.0};
  const double t_signal = approach(p, plan);
  const double t_lc = t_signal + p.indicator_lead;
  const double t_lca = t_lc + p.lane_change_duration;
  plan.left_indicator.push_back({t_signal, t_lca});
  plan.ramps.push_back({t_lc, t_lca, w / 2.0, 1.5 * w});
  plan.speed.set_speed(t_lca, p.ego_speed);

  // Ego draws level, then signals its return once return_gap ahead.
  const double gap_lca = gap_at(p, plan.speed, t_lca);
  const double t_return_signal = t_lca + (gap_lca + p.return_gap) / (p.ego_speed - p.other_speed);
  const double t_return = t_return_signal + p.indicator_lead;
  const double t_back = t_return + p.lane_change_duration;
  plan.right_indicator.push_back({t_return_signal, t_back});
  plan.ramps.push_back({t_return, t_back, 1.5 * w, w / 2.0});
  plan.end = t_back + p.tail;
  return render(p, plan);
}

Trace simulate_right_pass(const ScenarioParams& p) {
  validate_params(p);
  const double w = p.lane_width;
  EgoPlan plan{SpeedProfile(0.0, p.ego_speed), {}, {}, {}, 0.0};
  const double t_swerve = approach(p, plan);
  const double t_off = t_swerve + p.lane_change_duration;
  plan.speed.set_speed(t_swerve, p.ego_speed);
  plan.ramps.push_back({t_swerve, t_off, w / 2.0, -w / 2.0});
  const double t_level = t_swerve + gap_at(p, plan.speed, t_swerve) / (p.ego_speed - p.other_speed);
  plan.end = std::max(t_off, t_level) + p.tail;
  return render(p, plan);
}

Trace simulate_aborted_lane_change(const ScenarioParams& p) {
  validate_params(p);
  constexpr double kAbortSpeed = 8.0;
  constexpr double kSafeGap = 30.0;
  if (!(kAbortSpeed < p.other_speed)) throw ScenarioError("infeasible scenario: other_speed must exceed 8 m/s");
  const double w = p.lane_width;
  EgoPlan plan{SpeedProfile(0.0, p.ego_speed), {}, {}, {}, 0.0};
  const double t_signal = approach(p, plan);
  const double t_lc = t_signal + p.indicator_lead;
  const double half = p.lane_change_duration / 2.0;
  // Drift towards the lane marking without crossing it, then back.
  plan.ramps.push_back({t_lc, t_lc + half, w / 2.0, 0.9 * w});
  plan.ramps.push_back({t_lc + half, t_lc + 2.0 * half, 0.9 * w, w / 2.0});
  plan.left_indicator.push_back({t_signal, t_lc + 2.0 * half});
  plan.speed.set_speed(t_lc, kAbortSpeed);
  const double gap = gap_at(p, plan.speed, t_lc);
  const double t_safe = t_lc + std::max(0.0, kSafeGap - gap) / (p.other_speed - kAbortSpeed);
  plan.speed.set_speed(t_safe, p.other_speed);
  plan.end = std::max(t_safe, t_lc + 2.0 * half) + 2.0 + p.tail;
  return render(p, plan);
}

Trace simulate_slow_down(const ScenarioParams& p) {
  validate_params(p);
  constexpr double kFollowGap = 40.0;
  if (!(p.initial_gap > kFollowGap)) throw ScenarioError("infeasible scenario: initial_gap must exceed 40 m");
  EgoPlan plan{SpeedProfile(0.0, p.ego_speed), {}, {}, {}, 0.0};
  const double t_slow = (p.initial_gap - kFollowGap) / (p.ego_speed - p.other_speed);
  plan.speed.set_speed(t_slow, p.other_speed);
  plan.end = t_slow + 4.0 + p.tail;
  return render(p, plan);
}

Trace truncate_trace(const Trace& trace, double t_end) {
  Trace out;
  out.sample_rate = trace.sample_rate;
  for (const auto& s : trace.samples)
    if (s.timestamp <= t_end + 1e-9) out.samples.push_back(s);
  return out;
}

Trace simulate_truncated(const ScenarioParams& p) {
  validate_params(p);
  return truncate_trace(simulate_overtaking(p), trigger_time(p) + 0.2);
}

std::vector<std::string> fixture_names() {
  return {"overtaking", "right_pass", "aborted_lane_change", "slow_down", "truncated"};
}

Trace simulate_fixture(const std::string& name, const ScenarioParams& params) {
  static const std::map<std::string, std::function<Trace(const ScenarioParams&)>> generators = {
      {"overtaking", simulate_overtaking},
      {"right_pass", simulate_right_pass},
      {"aborted_lane_change", simulate_aborted_lane_change},
      {"slow_down", simulate_slow_down},
      {"truncated", simulate_truncated},
  };
  auto it = generators.find(name);
  if (it == generators.end()) throw ScenarioError("unknown fixture " + name);
  return it->second(params);
}

Bounds default_bounds(double lane_width) {
  auto car_bounds = [&](const std::string& id, double presence) {
    ObjectBounds b;
    b.id = id;
    b.kind = "Car";
    b.presence = presence;
    b.attrs["pos"] = PositionRange{{0.0, 150.0}, {-2.0, 2.0 * lane_width + 2.0}};
    b.attrs["v"] = NumberRange{0.0, 30.0};
    b.attrs["indicators_left"] = BoolChoice{};
    b.attrs["indicators_right"] = BoolChoice{};
    return b;
  };
  ObjectBounds lane;
  lane.id = "lane";
  lane.kind = "DoubleLane";
  lane.attrs["pos"] = Value{Vec2{0.0, 0.0}};
  lane.attrs["yR"] = Value{0.0};
  lane.attrs["yM"] = Value{lane_width};
  lane.attrs["yL"] = Value{2.0 * lane_width};
  return Bounds{{lane, car_bounds("ego", 1.0), car_bounds("other", 1.0), car_bounds("car3", 0.3)}};
}

}  // namespace tsc
