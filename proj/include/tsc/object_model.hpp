#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tsc {

// Typed universe that charts and situations are checked against.
//
// Basic types are `real`, `integer`, `boolean`, `position` (two real
// components x/y in metres) and user-declared enumerations. Attribute types,
// function parameters and predicate arguments name either a basic type, an
// enumeration, an object kind, or `set <T>` of one of those.

struct AttributeDecl {
  std::string name;
  std::string type;
  std::string unit;

  bool operator==(const AttributeDecl&) const = default;
};

struct ObjectKind {
  std::string name;
  std::vector<AttributeDecl> attributes;

  const AttributeDecl* find(std::string_view attribute) const;

  bool operator==(const ObjectKind&) const = default;
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> literals;

  bool operator==(const EnumDecl&) const = default;
};

// Function or predicate signature. Predicates leave `result` empty.
struct Signature {
  std::string name;
  std::vector<std::string> parameters;
  std::string result;

  bool operator==(const Signature&) const = default;
};

enum class ScalarType { Real, Integer, Boolean, Position, Enumeration };

struct ObjectModel {
  std::vector<EnumDecl> enums;
  std::vector<ObjectKind> kinds;
  std::vector<Signature> functions;
  std::vector<Signature> predicates;

  const ObjectKind* kind(std::string_view name) const;
  const EnumDecl* enumeration(std::string_view name) const;

  // Type of `path` on `kind`: either a plain attribute ("v") or a position
  // component ("pos.x"). Empty when the path does not resolve.
  std::optional<ScalarType> path_type(std::string_view kind, std::string_view path) const;

  bool operator==(const ObjectModel&) const = default;
};

// Names every object kind in a chart must declare as its anchor position.
inline constexpr std::string_view kPositionAttribute = "pos";

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

// Enumeration literals travel as strings.
using Value = std::variant<bool, std::int64_t, double, std::string, Vec2>;

// Numeric view of a scalar value; booleans read as 0/1. Throws EvalError for
// positions and enumerations.
double as_number(const Value& value);

std::string describe(const Value& value);

struct ObjectState {
  std::string kind;
  std::map<std::string, Value> attrs;

  bool operator==(const ObjectState&) const = default;
};

// One timestamped valuation of all traffic objects.
struct ConcreteSituation {
  double timestamp = 0.0;
  std::map<std::string, ObjectState> objects;

  bool operator==(const ConcreteSituation&) const = default;
};

struct Trace {
  double sample_rate = 20.0;
  std::vector<ConcreteSituation> samples;
};

struct Violation {
  std::string subject;
  std::string message;

  bool operator==(const Violation&) const = default;
};

using Violations = std::vector<Violation>;

Violations validate_object_model(const ObjectModel& om);

// Total, type-consistent valuation check. Violations are data, never thrown.
Violations validate_situation(const ObjectModel& om, const ConcreteSituation& sigma);

// Sample-wise validation plus strictly increasing timestamps and spacing
// within +-10% of 1/sample_rate.
Violations validate_trace(const ObjectModel& om, const Trace& trace);

inline constexpr double kSpacingTolerance = 0.10;

// rho(id)(attr). `attr` may address a position component ("pos.y").
// Throws LookupError on unknown identity or attribute.
Value lookup(const ConcreteSituation& sigma, std::string_view id, std::string_view attr);
double lookup_number(const ConcreteSituation& sigma, std::string_view id, std::string_view attr);

enum class Side { Left, Right };

std::string_view to_string(Side side);
std::optional<Side> parse_side(std::string_view text);

inline constexpr double kDefaultRangeM = 50.0;

// Identities of objects of ego's kind (ego excluded) whose pos.y lies strictly
// inside the lane band adjacent to ego's lane on `side`, within `range_m`
// longitudinally. Lane boundaries come from the unique object providing
// yR/yM/yL. Ego is in the right lane when ego.pos.y < yM, else the left one.
// Throws LookupError when ego or the lane object is missing.
std::vector<std::string> in_range(const ConcreteSituation& sigma, std::string_view ego, Side side,
                                  double range_m = kDefaultRangeM);

// Identity of the unique lane geometry object in sigma, if any.
std::optional<std::string> find_lane_object(const ConcreteSituation& sigma);

}  // namespace tsc
