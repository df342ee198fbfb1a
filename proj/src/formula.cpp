#include "tsc/formula.hpp"

#include "tsc/error.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <tuple>

namespace tsc {

namespace {

std::string anchor_attribute(const SpatialView& view, const SymbolDictionary& dict, const AnchorRef& ref) {
  const Placement* p = view.placement(ref.variable);
  if (!p) throw CompileError("unknown variable " + ref.variable);
  auto it = dict.entries.find(p->symbol);
  if (it == dict.entries.end()) throw CompileError("unknown symbol " + p->symbol);
  const Anchor* a = it->second.anchor(ref.anchor);
  if (!a) throw CompileError("unknown anchor " + ref.variable + "." + ref.anchor);
  return a->attribute;
}

AttrRef lateral(const std::string& variable) { return {variable, std::string(kPositionAttribute) + ".y"}; }

Term to_term(const TermExpr& e) {
  Term t;
  if (e.ref) t.ref = AttrRef{e.ref->variable, e.ref->path};
  t.offset = e.offset.value;
  return t;
}

// Does `from.x + d cmp to.x` force before.x < after.x (or <= when !strict)?
bool implies_order(const Comparison& c, const Ordering& o) {
  if (!c.lhs.ref || !c.rhs.ref) return false;
  // Rewrite as p.x + k (< | <=) q.x.
  AttrRef p = *c.lhs.ref, q = *c.rhs.ref;
  double k = c.lhs.offset - c.rhs.offset;
  Comparator cmp = c.cmp;
  if (cmp == Comparator::Greater || cmp == Comparator::GreaterEqual) {
    std::swap(p, q);
    k = -k;
    cmp = mirrored(cmp);
  }
  if (cmp == Comparator::Equal) return false;
  if (p.variable != o.before || q.variable != o.after) return false;
  if (o.strict) return (cmp == Comparator::LessEqual && k > 0.0) || (cmp == Comparator::Less && k >= 0.0);
  return k >= 0.0;
}

void push_unique(std::vector<Atom>& atoms, Atom atom) {
  if (std::find(atoms.begin(), atoms.end(), atom) == atoms.end()) atoms.push_back(std::move(atom));
}

// Total order on terms: references before constants.
auto term_key(const Term& t) {
  return std::make_tuple(t.ref ? 0 : 1, t.ref ? t.ref->variable : std::string(), t.ref ? t.ref->path : std::string(),
                         t.offset);
}

bool term_less(const Term& a, const Term& b) { return term_key(a) < term_key(b); }

bool atom_less(const Atom& a, const Atom& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* ca = std::get_if<Comparison>(&a)) {
    const auto& cb = std::get<Comparison>(b);
    if (ca->lhs != cb.lhs) return term_less(ca->lhs, cb.lhs);
    if (ca->cmp != cb.cmp) return ca->cmp < cb.cmp;
    return term_less(ca->rhs, cb.rhs);
  }
  if (const auto* ba = std::get_if<BandAtom>(&a)) {
    const auto& bb = std::get<BandAtom>(b);
    return std::tie(ba->subject, ba->lower, ba->upper) < std::tie(bb.subject, bb.lower, bb.upper);
  }
  const auto& ra = std::get<RangeEmpty>(a);
  const auto& rb = std::get<RangeEmpty>(b);
  return std::tie(ra.variable, ra.side, ra.range_m) < std::tie(rb.variable, rb.side, rb.range_m);
}

double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

Comparison canonical(Comparison c) {
  if (c.cmp == Comparator::Greater || c.cmp == Comparator::GreaterEqual) {
    std::swap(c.lhs, c.rhs);
    c.cmp = mirrored(c.cmp);
  }
  if (c.lhs.ref && c.rhs.ref) {
    if (c.cmp == Comparator::Equal && *c.rhs.ref < *c.lhs.ref) std::swap(c.lhs, c.rhs);
    c.lhs.offset -= c.rhs.offset;
    c.rhs.offset = 0.0;
  } else if (c.lhs.ref) {
    c.rhs.offset -= c.lhs.offset;
    c.lhs.offset = 0.0;
  } else if (c.rhs.ref) {
    c.lhs.offset -= c.rhs.offset;
    c.rhs.offset = 0.0;
    if (c.cmp == Comparator::Equal) std::swap(c.lhs, c.rhs);
  } else {
    c.lhs.offset -= c.rhs.offset;
    c.rhs.offset = 0.0;
  }
  c.lhs.offset = clean_zero(c.lhs.offset);
  c.rhs.offset = clean_zero(c.rhs.offset);
  return c;
}

bool has_lane_geometry(const ObjectState& s) {
  return s.attrs.contains("yR") && s.attrs.contains("yM") && s.attrs.contains("yL");
}

void collect_variables(const Atom& atom, std::vector<std::string>& out) {
  auto add = [&](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  if (const auto* c = std::get_if<Comparison>(&atom)) {
    if (c->lhs.ref) add(c->lhs.ref->variable);
    if (c->rhs.ref) add(c->rhs.ref->variable);
  } else if (const auto* b = std::get_if<BandAtom>(&atom)) {
    add(b->subject.variable);
    add(b->lower.variable);
    add(b->upper.variable);
  } else {
    add(std::get<RangeEmpty>(atom).variable);
  }
}

double term_value(const Term& t, const ConcreteSituation& sigma, const std::map<std::string, std::string>& binding) {
  if (!t.ref) return t.offset;
  auto it = binding.find(t.ref->variable);
  if (it == binding.end()) throw EvalError("unbound logical variable " + t.ref->variable);
  return lookup_number(sigma, it->second, t.ref->path) + t.offset;
}

}  // namespace

Formula compile_spatial_view(const SpatialView& view, const ObjectModel& om, const SymbolDictionary& dict) {
  Formula f;
  for (const auto& p : view.placements) {
    auto it = dict.entries.find(p.symbol);
    if (it == dict.entries.end()) throw CompileError("place " + p.variable + ": unknown symbol " + p.symbol);
    f.kinds[p.variable] = it->second.kind;
  }

  // (a) lateral band memberships, from in_band and somewhere-boxes alike
  std::vector<BandMembership> bands = view.bands;
  for (const auto& s : view.somewhere)
    for (const auto& v : s.variables) bands.push_back({v, s.region.lower, s.region.upper});
  for (const auto& b : bands) {
    push_unique(f.conjuncts, BandAtom{lateral(b.variable), {b.lower.variable, anchor_attribute(view, dict, b.lower)},
                                      {b.upper.variable, anchor_attribute(view, dict, b.upper)}});
  }

  // (b) distance lines: gap (to - from) cmp d  <=>  from.x + d mirrored(cmp) to.x
  std::vector<Comparison> distance_atoms;
  for (const auto& d : view.distances) {
    Comparison c{Term{AttrRef{d.from.variable, anchor_attribute(view, dict, d.from) + ".x"}, d.metres.value},
                 mirrored(d.cmp), Term{AttrRef{d.to.variable, anchor_attribute(view, dict, d.to) + ".x"}, 0.0}};
    distance_atoms.push_back(c);
    push_unique(f.conjuncts, c);
  }

  // (c) attribute constraints as written
  for (const auto& c : view.constraints) push_unique(f.conjuncts, Comparison{to_term(c.lhs), c.cmp, to_term(c.rhs)});

  // (d) nowhere-boxes as emptiness of the reference's inRange() on the side the region lies
  for (const auto& n : view.nowhere) {
    const std::string element = "nowhere " + n.kind;
    if (!n.region) throw CompileError(element + ": nowhere-box without region");
    const std::string ref = n.reference.empty() ? std::string(kDefaultNowhereReference) : n.reference;
    auto kind = f.kinds.find(ref);
    if (kind == f.kinds.end()) throw CompileError(element + ": unknown reference " + ref);
    if (kind->second != n.kind)
      throw CompileError(element + ": inRange() of " + ref + " only counts objects of kind " + kind->second);
    const std::string lo = anchor_attribute(view, dict, n.region->lower);
    const std::string hi = anchor_attribute(view, dict, n.region->upper);
    std::optional<Side> side;
    for (const auto& b : bands) {
      if (b.variable != ref) continue;
      if (anchor_attribute(view, dict, b.upper) == lo) side = Side::Left;
      else if (anchor_attribute(view, dict, b.lower) == hi) side = Side::Right;
    }
    if (!side) throw CompileError(element + ": region is not adjacent to the lane of " + ref);
    push_unique(f.conjuncts, RangeEmpty{ref, *side, n.range ? n.range->value : kDefaultRangeM});
  }

  // (e) canvas x-orderings not already forced by a distance line
  for (const auto& o : view.orderings) {
    const bool implied = std::any_of(distance_atoms.begin(), distance_atoms.end(),
                                     [&](const Comparison& c) { return implies_order(c, o); });
    if (implied) continue;
    const std::string px = std::string(kPositionAttribute) + ".x";
    push_unique(f.conjuncts, Comparison{Term{AttrRef{o.before, px}, 0.0},
                                        o.strict ? Comparator::Less : Comparator::LessEqual,
                                        Term{AttrRef{o.after, px}, 0.0}});
  }
  (void)om;
  return f;
}

NodeFormulaSequence compile_sequence_chart(const SequenceChart& chart, const ObjectModel& om,
                                           const SymbolDictionary& dict) {
  NodeFormulaSequence seq;
  for (std::size_t i = 0; i < chart.nodes.size(); ++i) {
    try {
      seq.nodes.push_back(compile_spatial_view(chart.nodes[i].view, om, dict));
    } catch (const CompileError& e) {
      throw CompileError("node " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return seq;
}

Formula normalize(const Formula& f) {
  Formula out;
  out.kinds = f.kinds;
  for (const auto& atom : f.conjuncts) {
    if (const auto* c = std::get_if<Comparison>(&atom)) {
      out.conjuncts.push_back(canonical(*c));
    } else if (const auto* b = std::get_if<BandAtom>(&atom)) {
      out.conjuncts.push_back(canonical({Term{b->lower, 0.0}, Comparator::Less, Term{b->subject, 0.0}}));
      out.conjuncts.push_back(canonical({Term{b->subject, 0.0}, Comparator::Less, Term{b->upper, 0.0}}));
    } else {
      out.conjuncts.push_back(atom);
    }
  }
  std::sort(out.conjuncts.begin(), out.conjuncts.end(), atom_less);
  out.conjuncts.erase(std::unique(out.conjuncts.begin(), out.conjuncts.end()), out.conjuncts.end());
  return out;
}

bool same_conjuncts(const Formula& a, const Formula& b) { return normalize(a).conjuncts == normalize(b).conjuncts; }

std::map<std::string, std::string> bind_variables(const Formula& f, const ConcreteSituation& sigma) {
  std::vector<std::string> variables;
  for (const auto& [v, kind] : f.kinds) variables.push_back(v);
  for (const auto& atom : f.conjuncts) collect_variables(atom, variables);

  std::map<std::string, std::string> binding;
  std::vector<std::string> pending;
  for (const auto& v : variables) {
    auto obj = sigma.objects.find(v);
    auto kind = f.kinds.find(v);
    if (obj != sigma.objects.end() && (kind == f.kinds.end() || kind->second == obj->second.kind))
      binding[v] = v;
    else
      pending.push_back(v);
  }
  if (pending.empty()) return binding;

  auto is_bound = [&](const std::string& id) {
    return std::any_of(binding.begin(), binding.end(), [&](const auto& b) { return b.second == id; });
  };
  for (const auto& v : pending) {
    auto kind = f.kinds.find(v);
    if (kind == f.kinds.end()) throw BindingError("unbound logical variable " + v);
    std::vector<std::string> candidates;
    for (const auto& [id, state] : sigma.objects)
      if (state.kind == kind->second && !is_bound(id)) candidates.push_back(id);
    if (candidates.empty()) throw BindingError("unbound logical variable " + v);

    if (has_lane_geometry(sigma.objects.at(candidates.front()))) {
      if (candidates.size() != 1) throw BindingError("unbound logical variable " + v + ": ambiguous lane object");
      binding[v] = candidates.front();
      continue;
    }
    // Role binding: nearest object ahead of ego in ego's lane.
    auto ego = binding.find(std::string(kDefaultNowhereReference));
    auto lane = find_lane_object(sigma);
    if (ego == binding.end() || !lane) throw BindingError("unbound logical variable " + v);
    const double y_m = lookup_number(sigma, *lane, "yM");
    const double ego_x = lookup_number(sigma, ego->second, "pos.x");
    const bool ego_right = lookup_number(sigma, ego->second, "pos.y") < y_m;
    std::optional<std::string> best;
    double best_x = std::numeric_limits<double>::infinity();
    for (const auto& id : candidates) {
      const double x = lookup_number(sigma, id, "pos.x");
      const bool right = lookup_number(sigma, id, "pos.y") < y_m;
      if (right == ego_right && x > ego_x && x < best_x) best = id, best_x = x;
    }
    if (!best) throw BindingError("unbound logical variable " + v);
    binding[v] = *best;
  }
  return binding;
}

bool evaluate_atom(const Atom& atom, const ConcreteSituation& sigma,
                   const std::map<std::string, std::string>& binding) {
  if (const auto* c = std::get_if<Comparison>(&atom))
    return compare(term_value(c->lhs, sigma, binding), c->cmp, term_value(c->rhs, sigma, binding));
  if (const auto* b = std::get_if<BandAtom>(&atom)) {
    const double y = term_value(Term{b->subject, 0.0}, sigma, binding);
    return term_value(Term{b->lower, 0.0}, sigma, binding) < y && y < term_value(Term{b->upper, 0.0}, sigma, binding);
  }
  const auto& r = std::get<RangeEmpty>(atom);
  auto it = binding.find(r.variable);
  if (it == binding.end()) throw EvalError("unbound logical variable " + r.variable);
  return in_range(sigma, it->second, r.side, r.range_m).empty();
}

bool evaluate_formula(const Formula& f, const ConcreteSituation& sigma) {
  if (f.conjuncts.empty()) return true;
  std::map<std::string, std::string> binding;
  try {
    binding = bind_variables(f, sigma);
  } catch (const BindingError&) {
    return false;  // chart instances have no counterpart in sigma
  }
  for (const auto& atom : f.conjuncts)
    if (!evaluate_atom(atom, sigma, binding)) return false;
  return true;
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, clean_zero(value));
  return std::string(buf, res.ptr);
}

std::string to_text(const Term& term) {
  if (!term.ref) return format_number(term.offset);
  std::string s = term.ref->variable + "." + term.ref->path;
  if (term.offset > 0.0) s += " + " + format_number(term.offset);
  else if (term.offset < 0.0) s += " - " + format_number(-term.offset);
  return s;
}

std::string to_text(const Atom& atom) {
  if (const auto* c = std::get_if<Comparison>(&atom))
    return to_text(c->lhs) + " " + std::string(to_string(c->cmp)) + " " + to_text(c->rhs);
  if (const auto* b = std::get_if<BandAtom>(&atom))
    return b->lower.variable + "." + b->lower.path + " < " + b->subject.variable + "." + b->subject.path + " < " +
           b->upper.variable + "." + b->upper.path;
  const auto& r = std::get<RangeEmpty>(atom);
  return r.variable + ".inRange(" + std::string(to_string(r.side)) + ", " + format_number(r.range_m) + ") = {}";
}

std::string to_text(const Formula& f) {
  if (f.conjuncts.empty()) return "true\n";
  std::string out;
  for (const auto& a : f.conjuncts) out += to_text(a) + "\n";
  return out;
}

std::string to_text(const NodeFormulaSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.nodes.size(); ++i) out += (i ? ";\n" : "") + to_text(seq.nodes[i]);
  return out;
}

}  // namespace tsc
