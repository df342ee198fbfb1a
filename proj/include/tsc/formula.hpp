#pragma once

#include "tsc/chart.hpp"
#include "tsc/object_model.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tsc {

struct AttrRef {
  std::string variable;
  std::string path;

  auto operator<=>(const AttrRef&) const = default;
  bool operator==(const AttrRef&) const = default;
};

// `ref + offset`, or the constant `offset` when there is no reference.
struct Term {
  std::optional<AttrRef> ref;
  double offset = 0.0;

  bool operator==(const Term&) const = default;
};

struct Comparison {
  Term lhs;
  Comparator cmp = Comparator::Less;
  Term rhs;

  bool operator==(const Comparison&) const = default;
};

// lower < subject < upper, strict on both bounds.
struct BandAtom {
  AttrRef subject;
  AttrRef lower;
  AttrRef upper;

  bool operator==(const BandAtom&) const = default;
};

// variable.inRange(side, range_m) = {}
struct RangeEmpty {
  std::string variable;
  Side side = Side::Left;
  double range_m = kDefaultRangeM;

  bool operator==(const RangeEmpty&) const = default;
};

using Atom = std::variant<Comparison, BandAtom, RangeEmpty>;

// Conjunction of atoms; the empty conjunction is true. `kinds` records the
// object kind of every chart variable, used when binding to a situation.
struct Formula {
  std::vector<Atom> conjuncts;
  std::map<std::string, std::string> kinds;
};

struct NodeFormulaSequence {
  std::vector<Formula> nodes;
};

Formula compile_spatial_view(const SpatialView& view, const ObjectModel& om, const SymbolDictionary& dict);

// Throws CompileError naming the failing node index.
NodeFormulaSequence compile_sequence_chart(const SequenceChart& chart, const ObjectModel& om,
                                           const SymbolDictionary& dict);

// Comparators reduced to {<, <=, =}, constants folded, band atoms expanded
// into their two strict comparisons, conjuncts sorted and deduplicated.
Formula normalize(const Formula& f);

// Equal conjunct sets once both sides are normalized.
bool same_conjuncts(const Formula& a, const Formula& b);

// Maps every chart variable of `f` to an object identity of `sigma`:
// identity match first; otherwise the unique lane object for lane kinds, or
// the nearest same-lane object of the variable's kind ahead of `ego`.
// Throws BindingError for a variable that cannot be bound.
std::map<std::string, std::string> bind_variables(const Formula& f, const ConcreteSituation& sigma);

// False when some chart variable cannot be bound in sigma.
bool evaluate_formula(const Formula& f, const ConcreteSituation& sigma);
bool evaluate_atom(const Atom& atom, const ConcreteSituation& sigma, const std::map<std::string, std::string>& binding);

std::string format_number(double value);
std::string to_text(const Term& term);
std::string to_text(const Atom& atom);
// One conjunct per line, canonical order when `f` is normalized.
std::string to_text(const Formula& f);
// Node texts separated by a line holding `;`.
std::string to_text(const NodeFormulaSequence& seq);

}  // namespace tsc
