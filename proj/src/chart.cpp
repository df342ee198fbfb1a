#include "tsc/chart.hpp"

#include <cmath>
#include <set>

namespace tsc {

const Anchor* Symbol::anchor(std::string_view name) const {
  for (const auto& a : anchors)
    if (a.name == name) return &a;
  return nullptr;
}

const Placement* SpatialView::placement(std::string_view variable) const {
  for (const auto& p : placements)
    if (p.variable == variable) return &p;
  return nullptr;
}

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Equal: return "=";
  }
  return "?";
}

bool compare(double lhs, Comparator cmp, double rhs) {
  switch (cmp) {
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEqual: return lhs <= rhs;
    case Comparator::Greater: return lhs > rhs;
    case Comparator::GreaterEqual: return lhs >= rhs;
    case Comparator::Equal: return lhs == rhs;
  }
  return false;
}

Comparator mirrored(Comparator cmp) {
  switch (cmp) {
    case Comparator::Less: return Comparator::Greater;
    case Comparator::LessEqual: return Comparator::GreaterEqual;
    case Comparator::Greater: return Comparator::Less;
    case Comparator::GreaterEqual: return Comparator::LessEqual;
    case Comparator::Equal: return Comparator::Equal;
  }
  return cmp;
}

Violations validate_dictionary(const SymbolDictionary& dict, const ObjectModel& om) {
  Violations out;
  for (const auto& [name, symbol] : dict.entries) {
    const ObjectKind* kind = om.kind(symbol.kind);
    if (!kind) {
      out.push_back({name, "unknown kind " + symbol.kind});
      continue;
    }
    if (symbol.anchors.empty()) out.push_back({name, "symbol without anchor"});
    std::set<std::string> seen;
    for (const auto& a : symbol.anchors) {
      const std::string where = name + "." + a.name;
      if (!seen.insert(a.name).second) out.push_back({where, "duplicate anchor"});
      const AttributeDecl* decl = kind->find(a.attribute);
      if (!decl) {
        out.push_back({where, "anchor bound to unknown attribute " + a.attribute});
      } else if (a.mode == AnchorMode::Point && decl->type != "position") {
        out.push_back({where, "point anchor must bind a position attribute"});
      } else if (a.mode == AnchorMode::LineFixedY && decl->type != "real") {
        out.push_back({where, "line anchor must bind a real attribute"});
      }
    }
  }
  return out;
}

const ObjectKind* variable_kind(const SpatialView& view, std::string_view variable, const ObjectModel& om,
                                const SymbolDictionary& dict) {
  const Placement* p = view.placement(variable);
  if (!p) return nullptr;
  auto it = dict.entries.find(p->symbol);
  if (it == dict.entries.end()) return nullptr;
  return om.kind(it->second.kind);
}

namespace {

class NodeChecker {
 public:
  NodeChecker(std::size_t node, const SpatialView& view, const ObjectModel& om, const SymbolDictionary& dict,
              ChartViolations& out)
      : node_(node), view_(view), om_(om), dict_(dict), out_(out) {}

  void run() {
    check_placements();
    for (const auto& o : view_.orderings) {
      const std::string el = "order " + o.before + " " + o.after;
      require_variable(o.before, el);
      require_variable(o.after, el);
      if (o.before == o.after) report(el, "ordering of an instance against itself");
    }
    for (const auto& b : view_.bands) {
      const std::string el = "in_band(" + b.variable + ")";
      require_variable(b.variable, el);
      check_anchor(b.lower, AnchorMode::LineFixedY, el);
      check_anchor(b.upper, AnchorMode::LineFixedY, el);
    }
    for (const auto& d : view_.distances) {
      const std::string el = "distance(" + d.from.variable + "." + d.from.anchor + ", " + d.to.variable + "." +
                             d.to.anchor + ")";
      check_anchor(d.from, AnchorMode::Point, el);
      check_anchor(d.to, AnchorMode::Point, el);
      if (d.from.variable == d.to.variable) report(el, "degenerate distance");
      if (d.cmp == Comparator::Equal) report(el, "distance lines need an inequality");
      if (!std::isfinite(d.metres.value)) report(el, "non-finite distance");
    }
    for (std::size_t i = 0; i < view_.constraints.size(); ++i) check_constraint(view_.constraints[i], i);
    for (const auto& n : view_.nowhere) {
      const std::string el = "nowhere " + n.kind;
      if (!om_.kind(n.kind)) report(el, "unknown kind " + n.kind);
      if (n.region) {
        check_anchor(n.region->lower, AnchorMode::LineFixedY, el);
        check_anchor(n.region->upper, AnchorMode::LineFixedY, el);
      }
      const std::string ref = n.reference.empty() ? std::string(kDefaultNowhereReference) : n.reference;
      require_variable(ref, el);
      if (n.range && !(n.range->value >= 0.0)) report(el, "negative range");
    }
    for (const auto& s : view_.somewhere) {
      const std::string el = "somewhere";
      if (s.variables.empty()) report(el, "somewhere-box without instances");
      for (const auto& v : s.variables) require_variable(v, el);
      check_anchor(s.region.lower, AnchorMode::LineFixedY, el);
      check_anchor(s.region.upper, AnchorMode::LineFixedY, el);
    }
  }

 private:
  void report(const std::string& element, const std::string& message) { out_.push_back({node_, element, message}); }

  void check_placements() {
    std::set<std::string> vars;
    for (const auto& p : view_.placements) {
      const std::string el = "place " + p.variable;
      if (!vars.insert(p.variable).second) report(el, "duplicate variable " + p.variable);
      auto it = dict_.entries.find(p.symbol);
      if (it == dict_.entries.end()) {
        report(el, "unknown symbol " + p.symbol);
        continue;
      }
      const ObjectKind* kind = om_.kind(it->second.kind);
      if (!kind) {
        report(el, "unknown kind " + it->second.kind);
        continue;
      }
      const AttributeDecl* pos = kind->find(kPositionAttribute);
      if (!pos || pos->type != "position")
        report(el, "kind " + kind->name + " lacks position attribute " + std::string(kPositionAttribute));
    }
  }

  bool require_variable(const std::string& variable, const std::string& element) {
    if (view_.placement(variable)) return true;
    report(element, "unknown variable " + variable);
    return false;
  }

  void check_anchor(const AnchorRef& ref, AnchorMode mode, const std::string& element) {
    const Placement* p = view_.placement(ref.variable);
    if (!p) {
      report(element, "unknown variable " + ref.variable);
      return;
    }
    auto it = dict_.entries.find(p->symbol);
    if (it == dict_.entries.end()) return;  // reported with the placement
    const Anchor* a = it->second.anchor(ref.anchor);
    if (!a) {
      report(element, "unknown anchor " + ref.variable + "." + ref.anchor);
    } else if (a->mode != mode) {
      report(element, std::string(mode == AnchorMode::Point ? "expected point anchor " : "expected line anchor ") +
                          ref.variable + "." + ref.anchor);
    }
  }

  // Type of one side of a comparison; nullopt for constants or on error.
  std::optional<ScalarType> term_type(const TermExpr& term, const std::string& element, bool& ok) {
    if (!term.ref) return std::nullopt;
    if (!require_variable(term.ref->variable, element)) {
      ok = false;
      return std::nullopt;
    }
    const ObjectKind* kind = variable_kind(view_, term.ref->variable, om_, dict_);
    if (!kind) {
      ok = false;
      return std::nullopt;
    }
    auto t = om_.path_type(kind->name, term.ref->path);
    if (!t) {
      report(element, "unknown attribute " + term.ref->variable + "." + term.ref->path);
      ok = false;
    }
    return t;
  }

  void check_constraint(const AttributeConstraint& c, std::size_t index) {
    const std::string el = "constraint " + std::to_string(index + 1);
    bool ok = true;
    auto lt = term_type(c.lhs, el, ok);
    auto rt = term_type(c.rhs, el, ok);
    if (!ok) return;
    if (!c.lhs.ref && !c.rhs.ref) {
      report(el, "comparison between constants");
      return;
    }
    for (auto t : {lt, rt}) {
      if (t == ScalarType::Position) report(el, "position attribute needs a component (.x or .y)");
      if (t == ScalarType::Enumeration) report(el, "enumeration attributes are not comparable");
    }
    const bool lbool = lt == ScalarType::Boolean, rbool = rt == ScalarType::Boolean;
    if (lbool || rbool) {
      if (c.cmp != Comparator::Equal) report(el, "boolean attributes only support =");
      const TermExpr& other = lbool ? c.rhs : c.lhs;
      const auto other_type = lbool ? rt : lt;
      if (other.ref && other_type != ScalarType::Boolean) report(el, "boolean compared with non-boolean");
      if (!other.ref && other.offset.value != 0.0 && other.offset.value != 1.0)
        report(el, "boolean compared with a constant other than 0/1");
      if ((lbool && c.lhs.offset.value != 0.0) || (rbool && c.rhs.offset.value != 0.0))
        report(el, "arithmetic on a boolean attribute");
    }
  }

  std::size_t node_;
  const SpatialView& view_;
  const ObjectModel& om_;
  const SymbolDictionary& dict_;
  ChartViolations& out_;
};

}  // namespace

ChartViolations well_typed(const SequenceChart& chart, const ObjectModel& om, const SymbolDictionary& dict) {
  ChartViolations out;
  if (chart.nodes.empty()) out.push_back({0, "chart", "sequence chart without nodes"});
  for (std::size_t i = 0; i < chart.nodes.size(); ++i) NodeChecker(i, chart.nodes[i].view, om, dict, out).run();
  return out;
}

}  // namespace tsc
