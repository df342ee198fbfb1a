#include "tsc/monitor.hpp"

#include "tsc/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace tsc {

using nlohmann::json;
using nlohmann::ordered_json;

// --- compiled specification --------------------------------------------------

const NodeFormulaSequence& CompiledBundle::chart(const std::string& name) const {
  auto it = charts.find(name);
  if (it == charts.end()) throw LookupError("unknown chart " + name);
  return it->second;
}

const Formula& CompiledBundle::context(const std::string& name) const {
  const NodeFormulaSequence& seq = chart(name);
  if (seq.nodes.size() != 1) throw LookupError("chart " + name + " is not a basic chart");
  return seq.nodes.front();
}

const CompiledExplanation* CompiledBundle::explanation(const std::string& id) const {
  for (const auto& e : explanations)
    if (e.id == id) return &e;
  return nullptr;
}

bool CompiledBundle::linked(const std::string& ctx) const {
  return std::any_of(explanations.begin(), explanations.end(),
                     [&](const CompiledExplanation& e) { return e.context == ctx; });
}

CompiledBundle compile_bundle(const SpecBundle& bundle) {
  CompiledBundle out;
  out.object_model = bundle.object_model;
  for (const auto& [name, chart] : bundle.charts) {
    try {
      out.charts[name] = compile_sequence_chart(chart, bundle.object_model, bundle.dictionary);
    } catch (const CompileError& e) {
      throw CompileError("chart " + name + ": " + e.what());
    }
  }
  out.contexts.assign(bundle.contexts.begin(), bundle.contexts.end());
  for (const auto& [id, e] : bundle.explanations) {
    CompiledExplanation ce;
    ce.id = id;
    ce.context = e.context;
    ce.context_formula = out.context(e.context);
    ce.expectable = e.expectable;
    ce.unexpectable = e.unexpectable;
    out.explanations.push_back(std::move(ce));
  }
  return out;
}

// --- monitors ---------------------------------------------------------------

MonitorVerdict monitor_step(const std::string& context_id, const Formula& context, const ConcreteSituation& sigma) {
  MonitorVerdict verdict{Verdict::Bottom, context_id, sigma.timestamp};
  try {
    if (evaluate_formula(context, sigma)) verdict.value = Verdict::Top;
  } catch (const Error& e) {
    throw EvalError("context " + context_id + ": " + e.what());
  }
  return verdict;
}

std::vector<std::string> select_explanations(const ConcreteSituation& sigma,
                                             const std::vector<CompiledExplanation>& explanations) {
  std::vector<std::string> out;
  for (const auto& e : explanations)
    if (monitor_step(e.context, e.context_formula, sigma).value == Verdict::Top) out.push_back(e.id);
  std::sort(out.begin(), out.end());
  return out;
}

// --- bounds -----------------------------------------------------------------

namespace {

NumberRange number_range(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    NumberRange r{j[0].get<double>(), j[1].get<double>()};
    if (!(r.lo <= r.hi)) throw Error("bounds: " + where + " has lo > hi");
    return r;
  }
  throw Error("bounds: " + where + " expects a number or [lo, hi]");
}

AttributeBounds attribute_bounds(const json& j, const std::string& where) {
  if (j.is_boolean()) return Value{j.get<bool>()};
  if (j.is_number()) return Value{j.get<double>()};
  if (j.is_string()) return Value{j.get<std::string>()};
  if (j.is_object()) {
    if (!j.contains("x") || !j.contains("y") || j.size() != 2)
      throw Error("bounds: " + where + " position needs exactly \"x\" and \"y\"");
    return PositionRange{number_range(j["x"], where + ".x"), number_range(j["y"], where + ".y")};
  }
  if (j.is_array() && !j.empty()) {
    if (j.size() == 2 && j[0].is_boolean() && j[1].is_boolean()) return BoolChoice{};
    if (std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_string(); })) {
      EnumChoice e;
      for (const auto& x : j) e.literals.push_back(x.get<std::string>());
      return e;
    }
    return number_range(j, where);
  }
  throw Error("bounds: unsupported specification for " + where);
}

double draw(const NumberRange& r, std::mt19937_64& rng) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

}  // namespace

Bounds parse_bounds(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("bounds: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("objects") || !j["objects"].is_array())
    throw Error("bounds: expected {\"objects\": [...]}");
  Bounds b;
  for (const auto& o : j["objects"]) {
    if (!o.is_object() || !o.contains("id") || !o.contains("kind") || !o.contains("attrs") ||
        !o["id"].is_string() || !o["kind"].is_string() || !o["attrs"].is_object())
      throw Error("bounds: every object needs string \"id\", \"kind\" and an \"attrs\" object");
    ObjectBounds ob;
    ob.id = o["id"].get<std::string>();
    ob.kind = o["kind"].get<std::string>();
    if (o.contains("presence")) {
      if (!o["presence"].is_number()) throw Error("bounds: presence of " + ob.id + " is not a number");
      ob.presence = o["presence"].get<double>();
      if (!(ob.presence >= 0.0 && ob.presence <= 1.0)) throw Error("bounds: presence of " + ob.id + " outside [0, 1]");
    }
    for (const auto& [name, spec] : o["attrs"].items()) ob.attrs[name] = attribute_bounds(spec, ob.id + "." + name);
    b.objects.push_back(std::move(ob));
  }
  return b;
}

Bounds load_bounds(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bounds(buf.str());
}

ConcreteSituation sample_situation(const Bounds& bounds, std::mt19937_64& rng) {
  ConcreteSituation sigma;
  for (const auto& ob : bounds.objects) {
    if (ob.presence < 1.0 && !std::bernoulli_distribution(ob.presence)(rng)) continue;
    ObjectState state;
    state.kind = ob.kind;
    for (const auto& [name, spec] : ob.attrs) {
      Value v;
      if (const auto* fixed = std::get_if<Value>(&spec)) v = *fixed;
      else if (const auto* r = std::get_if<NumberRange>(&spec)) v = draw(*r, rng);
      else if (std::holds_alternative<BoolChoice>(spec)) v = std::bernoulli_distribution(0.5)(rng);
      else if (const auto* e = std::get_if<EnumChoice>(&spec))
        v = e->literals[std::uniform_int_distribution<std::size_t>(0, e->literals.size() - 1)(rng)];
      else {
        const auto& p = std::get<PositionRange>(spec);
        const double x = draw(p.x, rng);
        v = Vec2{x, draw(p.y, rng)};
      }
      state.attrs[name] = std::move(v);
    }
    sigma.objects[ob.id] = std::move(state);
  }
  return sigma;
}

WellFormedReport check_well_formed(const std::vector<CompiledExplanation>& explanations, const ObjectModel& om,
                                   const Bounds& bounds, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw Error("check_well_formed: n_samples must be at least 1");
  if (bounds.objects.empty()) throw Error("check_well_formed: empty bounds");

  WellFormedReport report;
  report.samples = n_samples;
  const std::size_t n = explanations.size();
  std::vector<std::vector<ConcreteSituation>> witnesses(n * n);
  std::vector<bool> top(n);
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s) {
    ConcreteSituation sigma = sample_situation(bounds, rng);
    sigma.timestamp = static_cast<double>(s);
    if (auto v = validate_situation(om, sigma); !v.empty())
      throw Error("check_well_formed: bounds produce an invalid situation: " + v.front().subject + ": " +
                  v.front().message);
    for (std::size_t i = 0; i < n; ++i)
      top[i] = monitor_step(explanations[i].context, explanations[i].context_formula, sigma).value == Verdict::Top;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (top[i] && top[j]) witnesses[i * n + j].push_back(sigma);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!witnesses[i * n + j].empty())
        report.overlaps.push_back({explanations[i].context, explanations[j].context, std::move(witnesses[i * n + j])});
  return report;
}

// --- sequence charts --------------------------------------------------------

std::vector<std::vector<bool>> node_truth(const Trace& trace, const NodeFormulaSequence& seq) {
  std::vector<std::vector<bool>> truth;
  for (const auto& node : seq.nodes) {
    std::vector<bool> row(trace.samples.size());
    for (std::size_t j = 0; j < trace.samples.size(); ++j) row[j] = evaluate_formula(node, trace.samples[j]);
    truth.push_back(std::move(row));
  }
  return truth;
}

SequenceMatch match_sequence(const std::vector<std::vector<bool>>& truth, std::size_t b, std::size_t e) {
  SequenceMatch result;
  const std::size_t k = truth.size();
  if (k == 0 || e < b || e - b + 1 < 2 * k) return result;
  for (const auto& row : truth)
    if (row.size() <= e) throw Error("match_sequence: segment exceeds the trace");

  const std::size_t n = e - b + 1;
  // run[i][s]: consecutive samples from b+s on which node i holds, within [b, e].
  std::vector<std::vector<std::size_t>> run(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t s = n; s-- > 0;) run[i][s] = truth[i][b + s] ? run[i][s + 1] + 1 : 0;

  // feasible[i][s]: nodes i..k-1 can cover [b+s, e]; count[i][s]: feasible starts >= s.
  std::vector<std::vector<bool>> feasible(k, std::vector<bool>(n + 1, false));
  std::vector<std::vector<std::size_t>> count(k, std::vector<std::size_t>(n + 2, 0));
  for (std::size_t i = k; i-- > 0;) {
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t rest = n - s;
      if (i + 1 == k) {
        feasible[i][s] = rest >= 2 && run[i][s] >= rest;
      } else if (run[i][s] >= 2) {
        const std::size_t lo = s + 2, hi = std::min(s + run[i][s], n - 1);
        feasible[i][s] = lo <= hi && count[i + 1][lo] > count[i + 1][hi + 1];
      }
    }
    for (std::size_t s = n + 1; s-- > 0;) count[i][s] = (feasible[i][s] ? 1 : 0) + count[i][s + 1];
  }
  if (!feasible[0][0]) return result;

  result.matched = true;
  std::size_t s = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    std::size_t next = s + 2;
    while (!feasible[i + 1][next]) ++next;
    result.splits.push_back(b + next);
    s = next;
  }
  return result;
}

SequenceMatch match_sequence(const Trace& trace, std::size_t b, std::size_t e, const NodeFormulaSequence& seq) {
  if (e >= trace.samples.size() || b > e) throw Error("match_sequence: segment outside the trace");
  SequenceMatch m = match_sequence(node_truth(trace, seq), b, e);
  for (std::size_t s : m.splits) m.split_times.push_back(trace.samples[s].timestamp);
  return m;
}

std::optional<std::size_t> earliest_completion(const std::vector<std::vector<bool>>& truth, std::size_t from,
                                               std::size_t to) {
  const std::size_t k = truth.size();
  if (k == 0) return std::nullopt;
  // state[i]: capped length (0..2) of node i's block ending at the current
  // sample in the best partial match; 0 when none.
  std::vector<int> prev(k, 0), cur(k, 0);
  for (std::size_t j = from; j <= to && j < truth[0].size(); ++j) {
    for (std::size_t i = 0; i < k; ++i) {
      int v = 0;
      if (truth[i][j]) {
        if (i == 0) v = std::min(2, prev[0] + 1);
        else {
          if (prev[i] >= 1) v = std::min(2, prev[i] + 1);
          if (v == 0 && prev[i - 1] == 2) v = 1;
        }
      }
      cur[i] = v;
    }
    if (cur[k - 1] == 2) return j;
    std::swap(prev, cur);
  }
  return std::nullopt;
}

std::string_view to_string(ManoeuvreTag tag) {
  switch (tag) {
    case ManoeuvreTag::Expectable: return "expectable";
    case ManoeuvreTag::Unexpectable: return "unexpectable";
    default: return "unclassified";
  }
}

namespace {

using TruthCache = std::map<std::string, std::vector<std::vector<bool>>>;

const std::vector<std::vector<bool>>& cached_truth(TruthCache& cache, const Trace& trace, const CompiledBundle& bundle,
                                                   const std::string& chart) {
  auto it = cache.find(chart);
  if (it == cache.end()) it = cache.emplace(chart, node_truth(trace, bundle.chart(chart))).first;
  return it->second;
}

Classification classify_cached(TruthCache& cache, const Trace& trace, std::size_t start,
                               const CompiledExplanation& expl, const CompiledBundle& bundle, double window_s) {
  if (start >= trace.samples.size()) throw Error("classify_manoeuvre: start outside the trace");
  const double t0 = trace.samples[start].timestamp;
  const double t_end = t0 + window_s;
  constexpr double eps = 1e-9;
  std::size_t end = start;
  while (end + 1 < trace.samples.size() && trace.samples[end + 1].timestamp <= t_end + eps) ++end;

  Classification out;
  out.truncated = t_end > trace.samples.back().timestamp + eps;
  out.decided_at = trace.samples[end].timestamp;

  struct Best {
    std::size_t index;
    const ManoeuvreRef* ref;
  };
  auto best_of = [&](const std::vector<ManoeuvreRef>& family) {
    std::optional<Best> best;
    for (const auto& m : family) {
      auto done = earliest_completion(cached_truth(cache, trace, bundle, m.chart), start, end);
      if (done && (!best || *done < best->index)) best = Best{*done, &m};
    }
    return best;
  };
  const auto expectable = best_of(expl.expectable);
  const auto unexpectable = best_of(expl.unexpectable);
  if (!expectable && !unexpectable) return out;

  const bool pick_expectable = expectable && (!unexpectable || expectable->index <= unexpectable->index);
  const Best& pick = pick_expectable ? *expectable : *unexpectable;
  out.tag = pick_expectable ? ManoeuvreTag::Expectable : ManoeuvreTag::Unexpectable;
  out.chart = pick.ref->chart;
  out.label = pick.ref->label;
  out.decided_at = trace.samples[pick.index].timestamp;
  out.tie = expectable && unexpectable && expectable->index == unexpectable->index;
  // A decision reached inside the available samples does not depend on the cut.
  out.truncated = false;
  return out;
}

}  // namespace

Classification classify_manoeuvre(const Trace& trace, std::size_t start, const CompiledExplanation& expl,
                                  const CompiledBundle& bundle, double window_s) {
  TruthCache cache;
  return classify_cached(cache, trace, start, expl, bundle, window_s);
}

// --- sessions ---------------------------------------------------------------

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ContextEntered: return "context_entered";
    case EventKind::ContextExited: return "context_exited";
    case EventKind::ExplanationPresented: return "explanation_presented";
    case EventKind::NoContext: return "no_context";
    default: return "manoeuvre_classified";
  }
}

std::string event_to_json(const SessionEvent& ev) {
  ordered_json j;
  j["t"] = ev.t;
  j["event"] = std::string(to_string(ev.kind));
  if (!ev.context.empty()) j["context"] = ev.context;
  if (!ev.explanation.empty()) j["explanation"] = ev.explanation;
  if (!ev.bottom_case.empty()) j["case"] = ev.bottom_case;
  if (!ev.manoeuvre.empty()) j["manoeuvre"] = ev.manoeuvre;
  if (!ev.tag.empty()) j["tag"] = ev.tag;
  if (!ev.flags.empty()) j["flags"] = ev.flags;
  return j.dump();
}

SessionEvent event_from_json(const std::string& line) {
  const json j = json::parse(line);
  if (!j.is_object()) throw Error("event is not a JSON object");
  if (!j.contains("t") || !j["t"].is_number()) throw Error("event lacks numeric \"t\"");
  if (!j.contains("event") || !j["event"].is_string()) throw Error("event lacks \"event\"");
  SessionEvent ev;
  ev.t = j["t"].get<double>();
  const std::string kind = j["event"].get<std::string>();
  bool known = false;
  for (auto k : {EventKind::ContextEntered, EventKind::ContextExited, EventKind::ExplanationPresented,
                 EventKind::NoContext, EventKind::ManoeuvreClassified}) {
    if (to_string(k) == kind) {
      ev.kind = k;
      known = true;
    }
  }
  if (!known) throw Error("unknown event kind " + kind);
  auto text = [&](const char* name) { return j.contains(name) ? j[name].get<std::string>() : std::string(); };
  ev.context = text("context");
  ev.explanation = text("explanation");
  ev.bottom_case = text("case");
  ev.manoeuvre = text("manoeuvre");
  ev.tag = text("tag");
  if (j.contains("flags")) ev.flags = j["flags"].get<std::vector<std::string>>();
  return ev;
}

std::vector<SessionEvent> read_events(std::istream& in) {
  std::vector<SessionEvent> events;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(event_from_json(text));
    } catch (const std::exception& e) {
      throw TraceFormatError(line, e.what());
    }
  }
  return events;
}

std::string latency_to_json(const LatencyStats& s) {
  ordered_json j;
  j["samples"] = s.samples;
  j["p50_us"] = s.p50_us;
  j["p99_us"] = s.p99_us;
  j["max_us"] = s.max_us;
  return j.dump();
}

namespace {

SessionEvent make_event(EventKind kind, double t, std::string context = {}, std::string explanation = {}) {
  SessionEvent ev;
  ev.kind = kind;
  ev.t = t;
  ev.context = std::move(context);
  ev.explanation = std::move(explanation);
  return ev;
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

SessionTimeline run_session(const Trace& trace, const CompiledBundle& bundle, const SessionOptions& options) {
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    if (auto v = validate_situation(bundle.object_model, trace.samples[i]); !v.empty())
      throw SessionError(i, v.front().subject + ": " + v.front().message);
    if (i > 0 && !(trace.samples[i].timestamp > trace.samples[i - 1].timestamp))
      throw SessionError(i, "non-monotone t");
  }

  SessionTimeline out;
  std::vector<SessionEvent> sample_events, classifications;
  const std::size_t n_ctx = bundle.contexts.size();
  std::vector<const Formula*> formulas;
  std::vector<bool> linked;
  for (const auto& c : bundle.contexts) {
    formulas.push_back(&bundle.context(c));
    linked.push_back(bundle.linked(c));
  }
  std::vector<bool> active(n_ctx, false), now(n_ctx, false);
  std::vector<double> entered_at(n_ctx, 0.0);
  std::vector<double> latencies;
  latencies.reserve(trace.samples.size());
  TruthCache cache;

  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const ConcreteSituation& sigma = trace.samples[i];
    const double t = sigma.timestamp;
    const auto begin = std::chrono::steady_clock::now();
    for (std::size_t c = 0; c < n_ctx; ++c)
      now[c] = monitor_step(bundle.contexts[c], *formulas[c], sigma).value == Verdict::Top;
    const auto elapsed = std::chrono::steady_clock::now() - begin;
    latencies.push_back(std::chrono::duration<double, std::micro>(elapsed).count());

    for (std::size_t c = 0; c < n_ctx; ++c) {
      if (active[c] && !now[c]) {
        sample_events.push_back(make_event(EventKind::ContextExited, t, bundle.contexts[c]));
        out.intervals.push_back({bundle.contexts[c], entered_at[c], t});
      }
    }
    std::vector<const CompiledExplanation*> presented;
    for (std::size_t c = 0; c < n_ctx; ++c) {
      if (!active[c] && now[c]) {
        sample_events.push_back(make_event(EventKind::ContextEntered, t, bundle.contexts[c]));
        entered_at[c] = t;
        for (const auto& e : bundle.explanations)
          if (e.context == bundle.contexts[c]) presented.push_back(&e);
      }
    }
    std::sort(presented.begin(), presented.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto* e : presented) {
      sample_events.push_back(make_event(EventKind::ExplanationPresented, t, e->context, e->id));
      if (!options.classify) continue;
      const Classification cl = classify_cached(cache, trace, i, *e, bundle, options.window_s);
      SessionEvent ce = make_event(EventKind::ManoeuvreClassified, cl.decided_at, e->context, e->id);
      ce.manoeuvre = cl.chart;
      ce.tag = std::string(to_string(cl.tag));
      if (cl.truncated) ce.flags.push_back("truncated");
      if (cl.tie) ce.flags.push_back("tie");
      classifications.push_back(std::move(ce));
    }
    bool any_linked = false, any_unlinked = false;
    for (std::size_t c = 0; c < n_ctx; ++c) {
      if (!now[c]) continue;
      (linked[c] ? any_linked : any_unlinked) = true;
    }
    if (!any_linked) {
      SessionEvent ev = make_event(EventKind::NoContext, t);
      ev.bottom_case = any_unlinked ? "ii" : "i";
      sample_events.push_back(std::move(ev));
    }
    std::swap(active, now);
  }
  if (!trace.samples.empty()) {
    for (std::size_t c = 0; c < n_ctx; ++c)
      if (active[c]) out.intervals.push_back({bundle.contexts[c], entered_at[c], trace.samples.back().timestamp});
  }
  std::stable_sort(out.intervals.begin(), out.intervals.end(),
                   [](const ActiveInterval& a, const ActiveInterval& b) { return a.begin < b.begin; });

  // Merge: by time, sample-driven events before classifications decided at the same instant.
  out.events.reserve(sample_events.size() + classifications.size());
  std::stable_sort(classifications.begin(), classifications.end(),
                   [](const SessionEvent& a, const SessionEvent& b) { return a.t < b.t; });
  std::merge(sample_events.begin(), sample_events.end(), classifications.begin(), classifications.end(),
             std::back_inserter(out.events), [](const SessionEvent& a, const SessionEvent& b) { return a.t < b.t; });

  std::sort(latencies.begin(), latencies.end());
  out.latency.samples = latencies.size();
  out.latency.p50_us = percentile(latencies, 0.50);
  out.latency.p99_us = percentile(latencies, 0.99);
  out.latency.max_us = latencies.empty() ? 0.0 : latencies.back();
  return out;
}

std::vector<AnteHocViolation> check_ante_hoc(const Trace& trace, const CompiledBundle& bundle,
                                             const std::vector<SessionEvent>& events) {
  std::vector<AnteHocViolation> out;
  if (trace.samples.empty()) return out;
  std::map<std::string, double> first_presented;
  for (const auto& ev : events)
    if (ev.kind == EventKind::ExplanationPresented) first_presented.emplace(ev.explanation, ev.t);

  TruthCache cache;
  for (const auto& e : bundle.explanations) {
    std::optional<double> presented;
    if (auto it = first_presented.find(e.id); it != first_presented.end()) presented = it->second;
    for (const auto* family : {&e.expectable, &e.unexpectable}) {
      for (const auto& m : *family) {
        auto done = earliest_completion(cached_truth(cache, trace, bundle, m.chart), 0, trace.samples.size() - 1);
        if (!done) continue;
        const double completed = trace.samples[*done].timestamp;
        if (!presented || !(*presented < completed)) out.push_back({e.id, m.chart, presented, completed});
      }
    }
  }
  return out;
}

}  // namespace tsc
