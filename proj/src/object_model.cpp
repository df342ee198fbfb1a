#include "tsc/object_model.hpp"

#include "tsc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace tsc {

namespace {

constexpr std::array<std::string_view, 4> kBuiltinTypes = {"real", "integer", "boolean", "position"};

bool is_builtin(std::string_view type) {
  return std::find(kBuiltinTypes.begin(), kBuiltinTypes.end(), type) != kBuiltinTypes.end();
}

std::pair<std::string_view, std::string_view> split_path(std::string_view path) {
  auto dot = path.find('.');
  if (dot == std::string_view::npos) return {path, {}};
  return {path.substr(0, dot), path.substr(dot + 1)};
}

bool type_known(const ObjectModel& om, std::string_view type) {
  if (type.starts_with("set ")) type.remove_prefix(4);
  return is_builtin(type) || om.enumeration(type) != nullptr || om.kind(type) != nullptr;
}

// Checks one attribute value against its declared type; empty string when ok.
std::string type_error(const ObjectModel& om, const AttributeDecl& decl, const Value& value) {
  if (decl.type == "real") {
    if (std::holds_alternative<double>(value) || std::holds_alternative<std::int64_t>(value)) {
      if (const double* d = std::get_if<double>(&value); d && !std::isfinite(*d)) return "non-finite real";
      return {};
    }
    return "type mismatch";
  }
  if (decl.type == "integer") return std::holds_alternative<std::int64_t>(value) ? "" : "type mismatch";
  if (decl.type == "boolean") return std::holds_alternative<bool>(value) ? "" : "type mismatch";
  if (decl.type == "position") {
    const auto* p = std::get_if<Vec2>(&value);
    if (!p) return "type mismatch";
    if (!std::isfinite(p->x) || !std::isfinite(p->y)) return "non-finite position";
    return {};
  }
  if (const EnumDecl* e = om.enumeration(decl.type)) {
    const auto* s = std::get_if<std::string>(&value);
    if (!s) return "type mismatch";
    if (std::find(e->literals.begin(), e->literals.end(), *s) == e->literals.end()) return "unknown literal " + *s;
    return {};
  }
  // Object-valued attributes are not part of the value domain.
  return "unsupported attribute type " + decl.type;
}

}  // namespace

const AttributeDecl* ObjectKind::find(std::string_view attribute) const {
  for (const auto& a : attributes)
    if (a.name == attribute) return &a;
  return nullptr;
}

const ObjectKind* ObjectModel::kind(std::string_view name) const {
  for (const auto& k : kinds)
    if (k.name == name) return &k;
  return nullptr;
}

const EnumDecl* ObjectModel::enumeration(std::string_view name) const {
  for (const auto& e : enums)
    if (e.name == name) return &e;
  return nullptr;
}

std::optional<ScalarType> ObjectModel::path_type(std::string_view kind_name, std::string_view path) const {
  const ObjectKind* k = kind(kind_name);
  if (!k) return std::nullopt;
  auto [head, component] = split_path(path);
  const AttributeDecl* decl = k->find(head);
  if (!decl) return std::nullopt;
  if (decl->type == "position") {
    if (component.empty()) return ScalarType::Position;
    if (component == "x" || component == "y") return ScalarType::Real;
    return std::nullopt;
  }
  if (!component.empty()) return std::nullopt;
  if (decl->type == "real") return ScalarType::Real;
  if (decl->type == "integer") return ScalarType::Integer;
  if (decl->type == "boolean") return ScalarType::Boolean;
  if (enumeration(decl->type)) return ScalarType::Enumeration;
  return std::nullopt;
}

double as_number(const Value& value) {
  if (const auto* b = std::get_if<bool>(&value)) return *b ? 1.0 : 0.0;
  if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&value)) return *d;
  throw EvalError("value " + describe(value) + " is not numeric");
}

std::string describe(const Value& value) {
  std::ostringstream out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) out << (v ? "true" : "false");
        else if constexpr (std::is_same_v<T, Vec2>) out << "(" << v.x << ", " << v.y << ")";
        else if constexpr (std::is_same_v<T, std::string>) out << '"' << v << '"';
        else out << v;
      },
      value);
  return out.str();
}

Violations validate_object_model(const ObjectModel& om) {
  Violations out;
  std::set<std::string> names;
  for (const auto& e : om.enums) {
    if (!names.insert(e.name).second) out.push_back({e.name, "duplicate type name"});
    if (e.literals.empty()) out.push_back({e.name, "enumeration without literals"});
    std::set<std::string> lits(e.literals.begin(), e.literals.end());
    if (lits.size() != e.literals.size()) out.push_back({e.name, "duplicate enumeration literal"});
  }
  for (const auto& k : om.kinds) {
    if (is_builtin(k.name) || !names.insert(k.name).second) out.push_back({k.name, "duplicate kind name"});
    std::set<std::string> attrs;
    for (const auto& a : k.attributes) {
      if (!attrs.insert(a.name).second) out.push_back({k.name + "." + a.name, "duplicate attribute"});
      if (!type_known(om, a.type)) out.push_back({k.name + "." + a.name, "unknown type " + a.type});
    }
  }
  auto check_sigs = [&](const std::vector<Signature>& sigs, const char* what) {
    std::set<std::string> seen;
    for (const auto& s : sigs) {
      if (!seen.insert(s.name).second) out.push_back({s.name, std::string("duplicate ") + what});
      for (const auto& p : s.parameters)
        if (!type_known(om, p)) out.push_back({s.name, "unknown type " + p});
      if (!s.result.empty() && !type_known(om, s.result)) out.push_back({s.name, "unknown type " + s.result});
    }
  };
  check_sigs(om.functions, "function");
  check_sigs(om.predicates, "predicate");
  return out;
}

Violations validate_situation(const ObjectModel& om, const ConcreteSituation& sigma) {
  Violations out;
  if (!(sigma.timestamp >= 0.0) || !std::isfinite(sigma.timestamp))
    out.push_back({"t", "timestamp must be finite and >= 0"});
  for (const auto& [id, state] : sigma.objects) {
    const ObjectKind* k = om.kind(state.kind);
    if (!k) {
      out.push_back({id, "unknown kind " + state.kind});
      continue;
    }
    for (const auto& decl : k->attributes) {
      auto it = state.attrs.find(decl.name);
      if (it == state.attrs.end()) {
        out.push_back({id + "." + decl.name, "missing attribute " + id + "." + decl.name});
        continue;
      }
      if (auto err = type_error(om, decl, it->second); !err.empty())
        out.push_back({id + "." + decl.name, err + " " + id + "." + decl.name});
    }
    for (const auto& [name, value] : state.attrs)
      if (!k->find(name)) out.push_back({id + "." + name, "unknown attribute " + id + "." + name});
  }
  return out;
}

Violations validate_trace(const ObjectModel& om, const Trace& trace) {
  Violations out;
  if (!(trace.sample_rate > 0.0)) out.push_back({"trace", "sample rate must be positive"});
  const double nominal = trace.sample_rate > 0.0 ? 1.0 / trace.sample_rate : 0.0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    for (auto v : validate_situation(om, trace.samples[i])) {
      v.subject = "sample " + std::to_string(i) + ": " + v.subject;
      out.push_back(std::move(v));
    }
    if (i == 0) continue;
    const double dt = trace.samples[i].timestamp - trace.samples[i - 1].timestamp;
    if (!(dt > 0.0)) {
      out.push_back({"sample " + std::to_string(i), "non-monotone t"});
    } else if (nominal > 0.0 && std::abs(dt - nominal) > kSpacingTolerance * nominal) {
      out.push_back({"sample " + std::to_string(i), "sample spacing outside tolerance"});
    }
  }
  return out;
}

Value lookup(const ConcreteSituation& sigma, std::string_view id, std::string_view attr) {
  auto obj = sigma.objects.find(std::string(id));
  if (obj == sigma.objects.end()) throw LookupError("unknown identity " + std::string(id));
  auto [head, component] = split_path(attr);
  auto it = obj->second.attrs.find(std::string(head));
  if (it == obj->second.attrs.end())
    throw LookupError("unknown attribute " + std::string(id) + "." + std::string(attr));
  if (component.empty()) return it->second;
  const auto* p = std::get_if<Vec2>(&it->second);
  if (!p || (component != "x" && component != "y"))
    throw LookupError("unknown attribute " + std::string(id) + "." + std::string(attr));
  return component == "x" ? p->x : p->y;
}

double lookup_number(const ConcreteSituation& sigma, std::string_view id, std::string_view attr) {
  return as_number(lookup(sigma, id, attr));
}

std::string_view to_string(Side side) { return side == Side::Left ? "left" : "right"; }

std::optional<Side> parse_side(std::string_view text) {
  if (text == "left") return Side::Left;
  if (text == "right") return Side::Right;
  return std::nullopt;
}

std::optional<std::string> find_lane_object(const ConcreteSituation& sigma) {
  std::optional<std::string> found;
  for (const auto& [id, state] : sigma.objects) {
    if (state.attrs.contains("yR") && state.attrs.contains("yM") && state.attrs.contains("yL")) {
      if (found) throw LookupError("ambiguous lane object: " + *found + ", " + id);
      found = id;
    }
  }
  return found;
}

std::vector<std::string> in_range(const ConcreteSituation& sigma, std::string_view ego, Side side,
                                  double range_m) {
  auto lane = find_lane_object(sigma);
  if (!lane) throw LookupError("missing lane object");
  auto ego_it = sigma.objects.find(std::string(ego));
  if (ego_it == sigma.objects.end()) throw LookupError("unknown identity " + std::string(ego));

  const double y_r = lookup_number(sigma, *lane, "yR");
  const double y_m = lookup_number(sigma, *lane, "yM");
  const double y_l = lookup_number(sigma, *lane, "yL");
  const double ego_x = lookup_number(sigma, ego, "pos.x");
  const double ego_y = lookup_number(sigma, ego, "pos.y");

  const bool ego_in_right_lane = ego_y < y_m;
  double lo = 0.0, hi = 0.0;
  if (side == Side::Left && ego_in_right_lane) {
    lo = y_m, hi = y_l;
  } else if (side == Side::Right && !ego_in_right_lane) {
    lo = y_r, hi = y_m;
  } else {
    return {};  // no adjacent lane on that side of a two-lane carriageway
  }

  std::vector<std::string> out;
  for (const auto& [id, state] : sigma.objects) {
    if (id == ego || state.kind != ego_it->second.kind) continue;
    const double y = lookup_number(sigma, id, "pos.y");
    const double x = lookup_number(sigma, id, "pos.x");
    if (y > lo && y < hi && std::abs(x - ego_x) <= range_m) out.push_back(id);
  }
  return out;
}

}  // namespace tsc
