#pragma once

#include "tsc/monitor.hpp"

#include <string>
#include <vector>

namespace tsc {

enum class ReportFormat { Text, Json, Svg };

ReportFormat parse_report_format(const std::string& name);

enum class Family { Expectable, Unexpectable };

struct ReportConfig {
  ReportFormat format = ReportFormat::Svg;
  std::string multi_expectable = "blue";
  std::string single_expectable = "green";
  std::string unexpectable = "red";

  // Blue for each of several expectable manoeuvres, green for a single one,
  // red for every unexpectable one.
  const std::string& frame_colour(Family family, std::size_t expectable_count) const;
};

// Timeline of the trace's gap and lateral positions with one activity band
// per context. Every event is rendered exactly once. Throws ReportError for an
// event naming a context outside `contexts` or an exit without entry.
std::string render_timeline(const std::vector<SessionEvent>& events, const Trace& trace,
                            const std::vector<std::string>& contexts, ReportFormat format);

// Where the glyphs of one chart node go, read off its constraints.
struct NodeLayout {
  // "right", "left", "both" (straddling the marking), "off_right", "off_left" or "any".
  std::string ego_lane = "any";
  std::string other_lane = "any";
  // Ego relative to other: "behind", "ahead", "level" or "any".
  std::string order = "any";
  // Distance annotation such as "> 30 m", empty when unconstrained.
  std::string gap;
  bool indicator_left = false;
  bool indicator_right = false;
  // Speed relation: "ego faster", "ego slower", "ego not faster", ... or empty.
  std::string speed;
};

NodeLayout layout_node(const Formula& node);

struct Panel {
  std::string chart;
  std::string label;
  Family family = Family::Expectable;
  std::string frame;
  std::vector<NodeLayout> nodes;
};

std::vector<Panel> explanation_panels(const CompiledExplanation& expl, const CompiledBundle& bundle,
                                      const ReportConfig& config);

std::string render_explanation(const CompiledExplanation& expl, const CompiledBundle& bundle,
                               const ReportConfig& config);

}  // namespace tsc
