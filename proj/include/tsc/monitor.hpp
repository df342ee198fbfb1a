#pragma once

#include "tsc/formula.hpp"
#include "tsc/object_model.hpp"
#include "tsc/spec_parser.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace tsc {

// --- compiled specification --------------------------------------------------

struct CompiledExplanation {
  std::string id;
  std::string context;
  Formula context_formula;
  std::vector<ManoeuvreRef> expectable;
  std::vector<ManoeuvreRef> unexpectable;
};

struct CompiledBundle {
  ObjectModel object_model;
  std::map<std::string, NodeFormulaSequence> charts;
  // Basic-chart contexts, linked or not, in name order.
  std::vector<std::string> contexts;
  // Sorted by id.
  std::vector<CompiledExplanation> explanations;

  const NodeFormulaSequence& chart(const std::string& name) const;
  const Formula& context(const std::string& name) const;
  const CompiledExplanation* explanation(const std::string& id) const;
  bool linked(const std::string& context) const;
};

// Throws CompileError naming the failing chart.
CompiledBundle compile_bundle(const SpecBundle& bundle);

// --- monitors ---------------------------------------------------------------

enum class Verdict { Top, Bottom };

struct MonitorVerdict {
  Verdict value = Verdict::Bottom;
  std::string context_id;
  double timestamp = 0.0;
};

// TOP iff sigma satisfies the context formula. A context whose instances have
// no counterpart in sigma is BOTTOM; other evaluation errors are rethrown as
// EvalError carrying the context id.
MonitorVerdict monitor_step(const std::string& context_id, const Formula& context, const ConcreteSituation& sigma);

// Ids of every explanation whose context monitor is TOP on sigma, in id order.
std::vector<std::string> select_explanations(const ConcreteSituation& sigma,
                                             const std::vector<CompiledExplanation>& explanations);

// --- well-formedness --------------------------------------------------------

struct NumberRange {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const NumberRange&) const = default;
};

struct BoolChoice {
  bool operator==(const BoolChoice&) const = default;
};

struct EnumChoice {
  std::vector<std::string> literals;

  bool operator==(const EnumChoice&) const = default;
};

struct PositionRange {
  NumberRange x;
  NumberRange y;

  bool operator==(const PositionRange&) const = default;
};

// How one attribute is drawn: a fixed value, a uniform number range, a coin
// flip, a uniform enumeration literal, or a position with uniform components.
using AttributeBounds = std::variant<Value, NumberRange, BoolChoice, EnumChoice, PositionRange>;

struct ObjectBounds {
  std::string id;
  std::string kind;
  // Probability that the object is present in a sample.
  double presence = 1.0;
  std::map<std::string, AttributeBounds> attrs;
};

struct Bounds {
  std::vector<ObjectBounds> objects;
};

// JSON: {"objects": [{"id", "kind", "presence"?, "attrs": {name: spec}}]}
// where spec is a number or bool (fixed), [lo, hi] (uniform), [false, true]
// (coin flip), a list of strings (enumeration) or {"x": [..], "y": [..]}.
Bounds parse_bounds(const std::string& json_text);
Bounds load_bounds(const std::string& path);

ConcreteSituation sample_situation(const Bounds& bounds, std::mt19937_64& rng);

struct Overlap {
  std::string first;
  std::string second;
  std::vector<ConcreteSituation> witnesses;
};

struct WellFormedReport {
  std::size_t samples = 0;
  // One entry per context pair with at least one witness.
  std::vector<Overlap> overlaps;

  bool disjoint() const { return overlaps.empty(); }
};

// Sampling falsification of pairwise context disjointness: a disjoint verdict
// means no witness was found, not a proof. Throws Error for n_samples == 0,
// empty bounds, or samples that do not validate against `om`.
WellFormedReport check_well_formed(const std::vector<CompiledExplanation>& explanations, const ObjectModel& om,
                                   const Bounds& bounds, std::size_t n_samples, std::uint64_t seed = 0);

// --- sequence charts --------------------------------------------------------

// Truth of every node formula at every sample of the trace.
std::vector<std::vector<bool>> node_truth(const Trace& trace, const NodeFormulaSequence& seq);

struct SequenceMatch {
  bool matched = false;
  // Start index of nodes 2..k.
  std::vector<std::size_t> splits;
  std::vector<double> split_times;
};

// Node i holds at every sample of its block; blocks are consecutive, disjoint,
// cover [b, e] exactly and span at least two samples each. Returns the
// lexicographically earliest split vector.
SequenceMatch match_sequence(const Trace& trace, std::size_t b, std::size_t e, const NodeFormulaSequence& seq);
SequenceMatch match_sequence(const std::vector<std::vector<bool>>& truth, std::size_t b, std::size_t e);

// Smallest index e in [from, to] such that some segment [b, e] with b >= from
// matches; nullopt if none.
std::optional<std::size_t> earliest_completion(const std::vector<std::vector<bool>>& truth, std::size_t from,
                                               std::size_t to);

enum class ManoeuvreTag { Expectable, Unexpectable, Unclassified };

std::string_view to_string(ManoeuvreTag tag);

struct Classification {
  ManoeuvreTag tag = ManoeuvreTag::Unclassified;
  std::string chart;
  std::string label;
  // Completion time of the matching chart, or the end of the evaluated window.
  double decided_at = 0.0;
  bool truncated = false;
  bool tie = false;
};

// Searches the charts of F_E and F_V for the earliest completed match inside
// [t_start, t_start + window_s]. Ties between families go to F_E.
Classification classify_manoeuvre(const Trace& trace, std::size_t start, const CompiledExplanation& expl,
                                  const CompiledBundle& bundle, double window_s);

// --- sessions ---------------------------------------------------------------

enum class EventKind { ContextEntered, ContextExited, ExplanationPresented, NoContext, ManoeuvreClassified };

std::string_view to_string(EventKind kind);

struct SessionEvent {
  EventKind kind = EventKind::NoContext;
  double t = 0.0;
  std::string context;
  std::string explanation;
  // "i" or "ii" for no_context events.
  std::string bottom_case;
  std::string manoeuvre;
  std::string tag;
  std::vector<std::string> flags;

  bool operator==(const SessionEvent&) const = default;
};

std::string event_to_json(const SessionEvent& event);
SessionEvent event_from_json(const std::string& line);
// NDJSON; throws TraceFormatError with the offending line.
std::vector<SessionEvent> read_events(std::istream& in);

struct ActiveInterval {
  std::string context;
  double begin = 0.0;
  double end = 0.0;
};

struct LatencyStats {
  std::size_t samples = 0;
  double p50_us = 0.0;
  double p99_us = 0.0;
  double max_us = 0.0;
};

std::string latency_to_json(const LatencyStats& stats);

struct SessionTimeline {
  std::vector<SessionEvent> events;
  std::vector<ActiveInterval> intervals;
  LatencyStats latency;
};

struct SessionOptions {
  double window_s = 10.0;
  bool classify = true;
};

// Evaluates every context on every sample, in timestamp order. Throws
// SessionError for a sample that does not validate.
SessionTimeline run_session(const Trace& trace, const CompiledBundle& bundle, const SessionOptions& options = {});

struct AnteHocViolation {
  std::string explanation;
  std::string chart;
  std::optional<double> presented_at;
  double completed_at = 0.0;
};

// Every chart of F_E and F_V of an explanation must first complete (over the
// whole trace) strictly after that explanation was first presented.
std::vector<AnteHocViolation> check_ante_hoc(const Trace& trace, const CompiledBundle& bundle,
                                             const std::vector<SessionEvent>& events);

}  // namespace tsc
