#pragma once

#include "tsc/object_model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsc {

// Abstract syntax of traffic sequence charts. The AST is relational: canvas
// pixel positions are never stored, only the ordering, band-membership and
// distance relations they induce.

enum class AnchorMode { Point, LineFixedY };

// A drawable point or horizontal line of a symbol, bound to an attribute.
struct Anchor {
  std::string name;
  AnchorMode mode = AnchorMode::Point;
  std::string attribute;

  bool operator==(const Anchor&) const = default;
};

struct Symbol {
  std::string kind;
  std::vector<Anchor> anchors;

  const Anchor* anchor(std::string_view name) const;

  bool operator==(const Symbol&) const = default;
};

struct SymbolDictionary {
  std::map<std::string, Symbol> entries;

  bool operator==(const SymbolDictionary&) const = default;
};

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal };

std::string_view to_string(Comparator cmp);
bool compare(double lhs, Comparator cmp, double rhs);
// a cmp b  <=>  b mirrored(cmp) a
Comparator mirrored(Comparator cmp);

// Numeric literal, optionally written as a named spec constant. `value`
// always holds the resolved (signed) number.
struct Quantity {
  double value = 0.0;
  std::string symbol;

  bool operator==(const Quantity&) const = default;
};

// `variable.path`, e.g. ego + "pos.y" or lane + "yM".
struct AttrPath {
  std::string variable;
  std::string path;

  bool operator==(const AttrPath&) const = default;
};

// Attribute reference plus constant, or a bare constant.
struct TermExpr {
  std::optional<AttrPath> ref;
  Quantity offset;

  bool operator==(const TermExpr&) const = default;
};

struct AnchorRef {
  std::string variable;
  std::string anchor;

  bool operator==(const AnchorRef&) const = default;
};

struct Placement {
  std::string symbol;
  std::string variable;

  bool operator==(const Placement&) const = default;
};

// `before` is drawn left of (behind) `after` on the canvas.
struct Ordering {
  std::string before;
  std::string after;
  bool strict = true;

  bool operator==(const Ordering&) const = default;
};

struct BandMembership {
  std::string variable;
  AnchorRef lower;
  AnchorRef upper;

  bool operator==(const BandMembership&) const = default;
};

// Distance line between two point anchors; constrains the longitudinal gap
// `to.x - from.x` against `metres`.
struct DistanceConstraint {
  AnchorRef from;
  AnchorRef to;
  Comparator cmp = Comparator::LessEqual;
  Quantity metres;

  bool operator==(const DistanceConstraint&) const = default;
};

struct AttributeConstraint {
  TermExpr lhs;
  Comparator cmp = Comparator::Equal;
  TermExpr rhs;

  bool operator==(const AttributeConstraint&) const = default;
};

struct Region {
  AnchorRef lower;
  AnchorRef upper;

  bool operator==(const Region&) const = default;
};

// No object of `kind` inside `region`. Maps onto emptiness of
// `reference.inRange(side, range)`; an empty `reference` means `ego`.
struct NowhereBox {
  std::string kind;
  std::optional<Region> region;
  std::optional<Quantity> range;
  std::string reference;

  bool operator==(const NowhereBox&) const = default;
};

// The listed instances may sit anywhere laterally inside `region`.
struct SomewhereBox {
  std::vector<std::string> variables;
  Region region;

  bool operator==(const SomewhereBox&) const = default;
};

inline constexpr std::string_view kDefaultNowhereReference = "ego";

struct SpatialView {
  std::vector<Placement> placements;
  std::vector<Ordering> orderings;
  std::vector<BandMembership> bands;
  std::vector<DistanceConstraint> distances;
  std::vector<AttributeConstraint> constraints;
  std::vector<NowhereBox> nowhere;
  std::vector<SomewhereBox> somewhere;

  const Placement* placement(std::string_view variable) const;

  bool operator==(const SpatialView&) const = default;
};

struct InvariantNode {
  SpatialView view;

  bool operator==(const InvariantNode&) const = default;
};

struct SequenceChart {
  std::vector<InvariantNode> nodes;

  bool operator==(const SequenceChart&) const = default;
};

struct ManoeuvreRef {
  std::string chart;
  std::string label;

  bool operator==(const ManoeuvreRef&) const = default;
};

// E = (S, F_E, F_V), charts referenced by name within a bundle.
struct Explanation {
  std::string id;
  std::string context;
  std::vector<ManoeuvreRef> expectable;
  std::vector<ManoeuvreRef> unexpectable;

  bool operator==(const Explanation&) const = default;
};

struct ChartViolation {
  std::size_t node = 0;
  std::string element;
  std::string message;

  bool operator==(const ChartViolation&) const = default;
};

using ChartViolations = std::vector<ChartViolation>;

Violations validate_dictionary(const SymbolDictionary& dict, const ObjectModel& om);

// Static checks over every node of `chart`. Violations carry the node index
// (0-based) and the offending element.
ChartViolations well_typed(const SequenceChart& chart, const ObjectModel& om, const SymbolDictionary& dict);

// Kind bound to `variable` in `view`, or nullptr.
const ObjectKind* variable_kind(const SpatialView& view, std::string_view variable, const ObjectModel& om,
                                const SymbolDictionary& dict);

}  // namespace tsc
