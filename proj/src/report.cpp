#include "tsc/report.hpp"

#include "tsc/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace tsc {

using nlohmann::ordered_json;

ReportFormat parse_report_format(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  if (name == "svg") return ReportFormat::Svg;
  throw ReportError("unknown format " + name + " (expected text, json or svg)");
}

const std::string& ReportConfig::frame_colour(Family family, std::size_t expectable_count) const {
  if (family == Family::Unexpectable) return unexpectable;
  return expectable_count > 1 ? multi_expectable : single_expectable;
}

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string describe_event(const SessionEvent& ev) {
  std::string s = std::string(to_string(ev.kind));
  if (!ev.context.empty()) s += " context=" + ev.context;
  if (!ev.explanation.empty()) s += " explanation=" + ev.explanation;
  if (!ev.bottom_case.empty()) s += " case=" + ev.bottom_case;
  if (!ev.manoeuvre.empty()) s += " manoeuvre=" + ev.manoeuvre;
  if (!ev.tag.empty()) s += " tag=" + ev.tag;
  for (const auto& f : ev.flags) s += " flag=" + f;
  return s;
}

struct Series {
  std::vector<double> t;
  std::vector<std::optional<double>> gap;
  std::vector<std::optional<double>> ego_y;
  std::vector<std::optional<double>> other_y;
};

std::optional<double> try_lookup(const ConcreteSituation& sigma, const char* id, const char* attr) {
  if (!sigma.objects.contains(id)) return std::nullopt;
  try {
    return lookup_number(sigma, id, attr);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Series series_of(const Trace& trace) {
  Series s;
  for (const auto& sigma : trace.samples) {
    s.t.push_back(sigma.timestamp);
    const auto ex = try_lookup(sigma, "ego", "pos.x");
    const auto ox = try_lookup(sigma, "other", "pos.x");
    s.gap.push_back(ex && ox ? std::optional<double>(*ox - *ex) : std::nullopt);
    s.ego_y.push_back(try_lookup(sigma, "ego", "pos.y"));
    s.other_y.push_back(try_lookup(sigma, "other", "pos.y"));
  }
  return s;
}

std::vector<ActiveInterval> intervals_of(const std::vector<SessionEvent>& events,
                                         const std::vector<std::string>& contexts, double t_end) {
  std::map<std::string, double> open;
  std::vector<ActiveInterval> out;
  auto known = [&](const std::string& c) { return std::find(contexts.begin(), contexts.end(), c) != contexts.end(); };
  for (const auto& ev : events) {
    if (!ev.context.empty() && !known(ev.context)) throw ReportError("event references unknown context " + ev.context);
    if (ev.kind == EventKind::ContextEntered) {
      if (open.contains(ev.context)) throw ReportError("context " + ev.context + " entered twice");
      open[ev.context] = ev.t;
    } else if (ev.kind == EventKind::ContextExited) {
      auto it = open.find(ev.context);
      if (it == open.end()) throw ReportError("context " + ev.context + " exited without entry");
      out.push_back({ev.context, it->second, ev.t});
      open.erase(it);
    }
  }
  for (const auto& [c, begin] : open) out.push_back({c, begin, std::max(t_end, begin)});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
  return out;
}

double time_end(const std::vector<SessionEvent>& events, const Trace& trace) {
  double t = trace.samples.empty() ? 0.0 : trace.samples.back().timestamp;
  for (const auto& ev : events) t = std::max(t, ev.t);
  return t;
}

double time_begin(const std::vector<SessionEvent>& events, const Trace& trace) {
  double t = trace.samples.empty() ? (events.empty() ? 0.0 : events.front().t) : trace.samples.front().timestamp;
  for (const auto& ev : events) t = std::min(t, ev.t);
  return t;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string timeline_text(const std::vector<SessionEvent>& events, const Trace& trace,
                          const std::vector<std::string>& contexts, const std::vector<ActiveInterval>& intervals) {
  std::ostringstream out;
  const double t0 = time_begin(events, trace), t1 = time_end(events, trace);
  out << "timeline " << fixed(t0) << " .. " << fixed(t1) << " s, " << trace.samples.size() << " samples, "
      << events.size() << " events\n";
  out << "contexts:\n";
  for (const auto& c : contexts) {
    out << "  " << c << ":";
    bool any = false;
    for (const auto& iv : intervals) {
      if (iv.context != c) continue;
      out << " [" << fixed(iv.begin) << ", " << fixed(iv.end) << ")";
      any = true;
    }
    out << (any ? "\n" : " never active\n");
  }
  if (!trace.samples.empty()) {
    const Series s = series_of(trace);
    out << "series (1 s steps): t gap ego.y other.y\n";
    double next = s.t.front();
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (s.t[i] + 1e-9 < next && i + 1 != s.t.size()) continue;
      auto cell = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); };
      out << "  " << fixed(s.t[i]) << " " << cell(s.gap[i]) << " " << cell(s.ego_y[i]) << " " << cell(s.other_y[i])
          << "\n";
      next = s.t[i] + 1.0;
    }
  }
  out << "events:\n";
  for (const auto& ev : events) out << "  " << fixed(ev.t) << " " << describe_event(ev) << "\n";
  return out.str();
}

std::string timeline_json(const std::vector<SessionEvent>& events, const Trace& trace,
                          const std::vector<std::string>& contexts, const std::vector<ActiveInterval>& intervals) {
  ordered_json j;
  j["contexts"] = contexts;
  j["intervals"] = ordered_json::array();
  for (const auto& iv : intervals)
    j["intervals"].push_back({{"context", iv.context}, {"begin", iv.begin}, {"end", iv.end}});
  const Series s = series_of(trace);
  ordered_json series;
  series["t"] = s.t;
  for (auto [name, values] : {std::pair{"gap", &s.gap}, std::pair{"ego_y", &s.ego_y}, std::pair{"other_y", &s.other_y}}) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : *values) arr.push_back(optional_json(v));
    series[name] = std::move(arr);
  }
  j["series"] = std::move(series);
  j["events"] = ordered_json::array();
  for (const auto& ev : events) j["events"].push_back(ordered_json::parse(event_to_json(ev)));
  return j.dump(2) + "\n";
}

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

struct Plot {
  double x0, y0, width, height;
  double v_lo, v_hi;
};

std::string polyline(const Plot& p, const std::vector<double>& t, const std::vector<std::optional<double>>& v,
                     double t0, double t1, const char* colour, const char* cls) {
  std::string out;
  std::string points;
  auto flush = [&] {
    if (!points.empty())
      out += "<polyline class=\"" + std::string(cls) + "\" fill=\"none\" stroke=\"" + colour + "\" points=\"" + points +
             "\"/>\n";
    points.clear();
  };
  const double span = t1 > t0 ? t1 - t0 : 1.0;
  const double vspan = p.v_hi > p.v_lo ? p.v_hi - p.v_lo : 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!v[i]) {
      flush();
      continue;
    }
    const double x = p.x0 + (t[i] - t0) / span * p.width;
    const double y = p.y0 + p.height - (*v[i] - p.v_lo) / vspan * p.height;
    if (!points.empty()) points += ' ';
    points += fixed(x) + "," + fixed(y);
  }
  flush();
  return out;
}

std::pair<double, double> value_range(std::initializer_list<const std::vector<std::optional<double>>*> series) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto* s : series)
    for (const auto& v : *s)
      if (v) lo = std::min(lo, *v), hi = std::max(hi, *v);
  if (!std::isfinite(lo)) return {0.0, 1.0};
  if (lo == hi) return {lo - 1.0, hi + 1.0};
  return {lo, hi};
}

std::string timeline_svg(const std::vector<SessionEvent>& events, const Trace& trace,
                         const std::vector<std::string>& contexts, const std::vector<ActiveInterval>& intervals) {
  const double t0 = time_begin(events, trace), t1 = time_end(events, trace);
  const double span = t1 > t0 ? t1 - t0 : 1.0;
  constexpr double left = 80, width = 800, plot_h = 140, band_h = 18;
  const double band_top = 40 + 2 * (plot_h + 30);
  const double events_top = band_top + contexts.size() * (band_h + 6) + 10;
  const double height = events_top + 40;
  auto tx = [&](double t) { return left + (t - t0) / span * width; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(left + width + 40, 0) << "\" height=\""
      << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<g class=\"axes\">\n";
  const Plot gap_plot{left, 40, width, plot_h, 0, 0};
  const Plot y_plot{left, 40 + plot_h + 30, width, plot_h, 0, 0};
  for (const Plot* p : {&gap_plot, &y_plot})
    out << "<rect x=\"" << fixed(p->x0) << "\" y=\"" << fixed(p->y0) << "\" width=\"" << fixed(p->width)
        << "\" height=\"" << fixed(p->height) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fixed(left) << "\" y=\"32\">gap other.x - ego.x [m]</text>\n";
  out << "<text x=\"" << fixed(left) << "\" y=\"" << fixed(y_plot.y0 - 8) << "\">lateral position [m]</text>\n";
  for (int k = 0; k <= 10; ++k) {
    const double t = t0 + span * k / 10.0;
    out << "<text class=\"tick\" x=\"" << fixed(tx(t)) << "\" y=\"" << fixed(events_top + 34) << "\">" << fixed(t, 1)
        << "</text>\n";
  }
  out << "</g>\n";

  if (!trace.samples.empty()) {
    const Series s = series_of(trace);
    Plot gp = gap_plot;
    std::tie(gp.v_lo, gp.v_hi) = value_range({&s.gap});
    Plot yp = y_plot;
    std::tie(yp.v_lo, yp.v_hi) = value_range({&s.ego_y, &s.other_y});
    out << "<g class=\"series\">\n";
    out << polyline(gp, s.t, s.gap, t0, t1, "#444444", "gap");
    out << polyline(yp, s.t, s.ego_y, t0, t1, "#1f77b4", "ego-y");
    out << polyline(yp, s.t, s.other_y, t0, t1, "#d62728", "other-y");
    out << "<text x=\"" << fixed(left - 70) << "\" y=\"" << fixed(gp.y0 + 10) << "\">" << fixed(gp.v_hi, 1)
        << "</text>\n<text x=\"" << fixed(left - 70) << "\" y=\"" << fixed(gp.y0 + gp.height) << "\">"
        << fixed(gp.v_lo, 1) << "</text>\n";
    out << "<text x=\"" << fixed(left - 70) << "\" y=\"" << fixed(yp.y0 + 10) << "\">" << fixed(yp.v_hi, 1)
        << "</text>\n<text x=\"" << fixed(left - 70) << "\" y=\"" << fixed(yp.y0 + yp.height) << "\">"
        << fixed(yp.v_lo, 1) << "</text>\n";
    out << "</g>\n";
  }

  out << "<g class=\"bands\">\n";
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    const double y = band_top + c * (band_h + 6);
    const char* colour = kPalette[c % std::size(kPalette)];
    out << "<text x=\"" << fixed(left - 70) << "\" y=\"" << fixed(y + 13) << "\">" << escape_xml(contexts[c])
        << "</text>\n";
    for (const auto& iv : intervals) {
      if (iv.context != contexts[c]) continue;
      out << "<rect class=\"band\" data-context=\"" << escape_xml(iv.context) << "\" x=\"" << fixed(tx(iv.begin))
          << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(std::max(1.0, tx(iv.end) - tx(iv.begin)))
          << "\" height=\"" << fixed(band_h) << "\" fill=\"" << colour << "\" fill-opacity=\"0.6\"/>\n";
    }
  }
  out << "</g>\n<g class=\"events\">\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    double y = events_top;
    if (!ev.context.empty()) {
      auto it = std::find(contexts.begin(), contexts.end(), ev.context);
      y = band_top + static_cast<double>(it - contexts.begin()) * (band_h + 6);
    }
    out << "<line class=\"event\" data-index=\"" << i << "\" data-kind=\"" << to_string(ev.kind) << "\" x1=\""
        << fixed(tx(ev.t)) << "\" x2=\"" << fixed(tx(ev.t)) << "\" y1=\"" << fixed(y) << "\" y2=\""
        << fixed(y + band_h) << "\" stroke=\"black\"><title>" << fixed(ev.t) << " "
        << escape_xml(describe_event(ev)) << "</title></line>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace

std::string render_timeline(const std::vector<SessionEvent>& events, const Trace& trace,
                            const std::vector<std::string>& contexts, ReportFormat format) {
  const auto intervals = intervals_of(events, contexts, time_end(events, trace));
  switch (format) {
    case ReportFormat::Text: return timeline_text(events, trace, contexts, intervals);
    case ReportFormat::Json: return timeline_json(events, trace, contexts, intervals);
    default: return timeline_svg(events, trace, contexts, intervals);
  }
}

// --- explanation cards ------------------------------------------------------

namespace {

// Lane attributes in lateral order.
std::optional<int> boundary_rank(const AttrRef& r) {
  if (r.path == "yR") return 0;
  if (r.path == "yM") return 1;
  if (r.path == "yL") return 2;
  return std::nullopt;
}

std::string lane_of(std::optional<int> lower, std::optional<int> upper) {
  if (lower && upper) {
    if (*lower == 0 && *upper == 1) return "right";
    if (*lower == 1 && *upper == 2) return "left";
    if (*lower == 0 && *upper == 2) return "both";
    return "any";
  }
  if (upper) return *upper == 0 ? "off_right" : *upper == 1 ? "right" : "any";
  if (lower) return *lower == 2 ? "off_left" : *lower == 1 ? "left" : "any";
  return "any";
}

bool is(const std::optional<AttrRef>& r, const char* var, const char* path) {
  return r && r->variable == var && r->path == path;
}

}  // namespace

NodeLayout layout_node(const Formula& node) {
  NodeLayout out;
  std::map<std::string, std::optional<int>> lower, upper;
  for (const auto& atom : normalize(node).conjuncts) {
    const auto* c = std::get_if<Comparison>(&atom);
    if (!c) continue;
    const bool strict = c->cmp == Comparator::Less;
    // Lateral bounds: lane.yX < v.pos.y or v.pos.y < lane.yX.
    for (const char* v : {"ego", "other"}) {
      if (is(c->rhs.ref, v, "pos.y") && c->lhs.ref) {
        if (auto r = boundary_rank(*c->lhs.ref)) lower[v] = std::max(lower[v].value_or(-1), *r);
      }
      if (is(c->lhs.ref, v, "pos.y") && c->rhs.ref) {
        if (auto r = boundary_rank(*c->rhs.ref)) upper[v] = std::min(upper[v].value_or(3), *r);
      }
    }
    const double k = c->lhs.offset;
    const std::string op = c->cmp == Comparator::Equal ? "=" : strict ? ">" : ">=";
    if (is(c->lhs.ref, "ego", "pos.x") && is(c->rhs.ref, "other", "pos.x") && c->cmp != Comparator::Equal) {
      if (k >= 0.0) out.order = "behind";
      if (k > 0.0) out.gap = op + " " + format_number(k) + " m";
    } else if (is(c->lhs.ref, "other", "pos.x") && is(c->rhs.ref, "ego", "pos.x") && c->cmp != Comparator::Equal) {
      if (k >= 0.0) out.order = "ahead";
      if (k < 0.0) out.gap = std::string(strict ? "<" : "<=") + " " + format_number(-k) + " m";
    } else if (is(c->lhs.ref, "ego", "v") && is(c->rhs.ref, "other", "v")) {
      out.speed = c->cmp == Comparator::Equal ? "ego as fast" : strict ? "ego slower" : "ego not faster";
    } else if (is(c->lhs.ref, "other", "v") && is(c->rhs.ref, "ego", "v")) {
      out.speed = strict ? "ego faster" : "ego not slower";
    } else if (c->cmp == Comparator::Equal && !c->rhs.ref && c->rhs.offset == 1.0) {
      if (is(c->lhs.ref, "ego", "indicators_left")) out.indicator_left = true;
      if (is(c->lhs.ref, "ego", "indicators_right")) out.indicator_right = true;
    }
  }
  out.ego_lane = lane_of(lower["ego"], upper["ego"]);
  out.other_lane = lane_of(lower["other"], upper["other"]);
  return out;
}

std::vector<Panel> explanation_panels(const CompiledExplanation& expl, const CompiledBundle& bundle,
                                      const ReportConfig& config) {
  std::vector<Panel> panels;
  for (const auto* family : {&expl.expectable, &expl.unexpectable}) {
    const Family f = family == &expl.expectable ? Family::Expectable : Family::Unexpectable;
    for (const auto& m : *family) {
      Panel p;
      p.chart = m.chart;
      p.label = m.label;
      p.family = f;
      p.frame = config.frame_colour(f, expl.expectable.size());
      for (const auto& node : bundle.chart(m.chart).nodes) p.nodes.push_back(layout_node(node));
      panels.push_back(std::move(p));
    }
  }
  return panels;
}

namespace {

std::string_view family_name(Family f) { return f == Family::Expectable ? "expectable" : "unexpectable"; }

double lane_y(const std::string& lane, double top, double lane_h) {
  // Rows from the top: off_left, left, marking, right, off_right.
  if (lane == "off_left") return top - lane_h * 0.3;
  if (lane == "left") return top + lane_h * 0.5;
  if (lane == "both") return top + lane_h;
  if (lane == "off_right") return top + lane_h * 2.3;
  return top + lane_h * 1.5;
}

void car_glyph(std::ostringstream& out, double x, double y, const char* fill, const std::string& cls, bool left,
               bool right) {
  out << "<rect class=\"" << cls << "\" x=\"" << fixed(x - 14) << "\" y=\"" << fixed(y - 7)
      << "\" width=\"28\" height=\"14\" rx=\"3\" fill=\"" << fill << "\"/>\n";
  // Yellow blobs on the indicated side (up is left in driving direction).
  if (left)
    out << "<circle class=\"indicator-left\" cx=\"" << fixed(x + 12) << "\" cy=\"" << fixed(y - 7)
        << "\" r=\"3\" fill=\"gold\"/>\n";
  if (right)
    out << "<circle class=\"indicator-right\" cx=\"" << fixed(x + 12) << "\" cy=\"" << fixed(y + 7)
        << "\" r=\"3\" fill=\"gold\"/>\n";
}

std::string explanation_svg(const CompiledExplanation& expl, const std::vector<Panel>& panels) {
  constexpr double node_w = 170, node_gap = 30, lane_h = 26, panel_h = 120, margin = 10;
  std::size_t max_nodes = 1;
  for (const auto& p : panels) max_nodes = std::max(max_nodes, p.nodes.size());
  const double width = margin * 2 + max_nodes * node_w + (max_nodes - 1) * node_gap + 20;
  const double height = 40 + panels.size() * (panel_h + margin);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << fixed(margin) << "\" y=\"20\">" << escape_xml(expl.id) << " in context "
      << escape_xml(expl.context) << "</text>\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const double top = 30 + pi * (panel_h + margin);
    out << "<g class=\"panel " << family_name(p.family) << "\" data-chart=\"" << escape_xml(p.chart) << "\">\n";
    out << "<rect class=\"frame\" x=\"" << fixed(margin) << "\" y=\"" << fixed(top) << "\" width=\""
        << fixed(width - 2 * margin) << "\" height=\"" << fixed(panel_h) << "\" fill=\"none\" stroke=\"" << p.frame
        << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << fixed(margin + 6) << "\" y=\"" << fixed(top + 14) << "\">" << escape_xml(p.chart);
    if (!p.label.empty()) out << ": " << escape_xml(p.label);
    out << "</text>\n";
    for (std::size_t ni = 0; ni < p.nodes.size(); ++ni) {
      const NodeLayout& n = p.nodes[ni];
      const double x0 = margin + 10 + ni * (node_w + node_gap);
      const double road = top + 30;
      out << "<g class=\"node\">\n";
      for (int b = 0; b <= 2; ++b)
        out << "<line class=\"lane-boundary\" x1=\"" << fixed(x0) << "\" x2=\"" << fixed(x0 + node_w) << "\" y1=\""
            << fixed(road + b * lane_h) << "\" y2=\"" << fixed(road + b * lane_h) << "\" stroke=\"grey\""
            << (b == 1 ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      double ego_x = x0 + node_w * 0.5, other_x = x0 + node_w * 0.5;
      if (n.order == "behind") ego_x = x0 + node_w * 0.25, other_x = x0 + node_w * 0.75;
      else if (n.order == "ahead") ego_x = x0 + node_w * 0.75, other_x = x0 + node_w * 0.25;
      else if (n.order == "any") ego_x = x0 + node_w * 0.35, other_x = x0 + node_w * 0.65;
      car_glyph(out, other_x, lane_y(n.other_lane, road, lane_h), "#d62728", "car other", false, false);
      car_glyph(out, ego_x, lane_y(n.ego_lane, road, lane_h), "#1f77b4", "car ego", n.indicator_left,
                n.indicator_right);
      std::string caption = n.gap.empty() ? "" : "gap " + n.gap;
      if (!n.speed.empty()) caption += (caption.empty() ? "" : ", ") + n.speed;
      if (!caption.empty())
        out << "<text x=\"" << fixed(x0) << "\" y=\"" << fixed(road + 2 * lane_h + 24) << "\">" << escape_xml(caption)
            << "</text>\n";
      out << "</g>\n";
      if (ni + 1 < p.nodes.size()) {
        const double ax = x0 + node_w + 4, ay = road + lane_h;
        out << "<path class=\"arrow\" d=\"M" << fixed(ax) << " " << fixed(ay) << " L" << fixed(ax + node_gap - 8) << " "
            << fixed(ay) << " M" << fixed(ax + node_gap - 14) << " " << fixed(ay - 5) << " L"
            << fixed(ax + node_gap - 8) << " " << fixed(ay) << " L" << fixed(ax + node_gap - 14) << " "
            << fixed(ay + 5) << "\" stroke=\"black\" fill=\"none\"/>\n";
      }
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string node_text(const NodeLayout& n) {
  std::string s = "ego " + n.ego_lane + " lane, other " + n.other_lane + " lane, ego " + n.order;
  if (!n.gap.empty()) s += ", gap " + n.gap;
  if (!n.speed.empty()) s += ", " + n.speed;
  if (n.indicator_left) s += ", left indicator";
  if (n.indicator_right) s += ", right indicator";
  return s;
}

}  // namespace

std::string render_explanation(const CompiledExplanation& expl, const CompiledBundle& bundle,
                               const ReportConfig& config) {
  const auto panels = explanation_panels(expl, bundle, config);
  if (config.format == ReportFormat::Svg) return explanation_svg(expl, panels);
  if (config.format == ReportFormat::Json) {
    ordered_json j;
    j["explanation"] = expl.id;
    j["context"] = expl.context;
    j["panels"] = ordered_json::array();
    for (const auto& p : panels) {
      ordered_json pj;
      pj["chart"] = p.chart;
      pj["label"] = p.label;
      pj["family"] = std::string(family_name(p.family));
      pj["frame"] = p.frame;
      pj["nodes"] = ordered_json::array();
      for (const auto& n : p.nodes)
        pj["nodes"].push_back({{"ego_lane", n.ego_lane},
                               {"other_lane", n.other_lane},
                               {"order", n.order},
                               {"gap", n.gap},
                               {"speed", n.speed},
                               {"indicator_left", n.indicator_left},
                               {"indicator_right", n.indicator_right}});
      j["panels"].push_back(std::move(pj));
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "explanation " << expl.id << " (context " << expl.context << ")\n";
  for (const auto& p : panels) {
    out << "[" << p.frame << "] " << family_name(p.family) << " " << p.chart;
    if (!p.label.empty()) out << ": " << p.label;
    out << "\n";
    for (std::size_t i = 0; i < p.nodes.size(); ++i) out << "  node " << i + 1 << ": " << node_text(p.nodes[i]) << "\n";
  }
  return out.str();
}

}  // namespace tsc
