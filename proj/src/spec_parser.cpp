#include "tsc/spec_parser.hpp"

#include "lexer.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tsc {

using detail::Lexer;
using detail::Token;
using detail::TokenKind;

SpecTypeError::SpecTypeError(std::vector<std::string> problems)
    : Error([&] {
        std::string msg = "ill-typed specification:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

double to_double(const Token& t, const Lexer& lex) {
  double v = 0.0;
  auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) lex.fail("malformed number " + t.text);
  return v;
}

std::optional<Comparator> comparator_of(const Token& t) {
  if (t.kind != TokenKind::Punct) return std::nullopt;
  if (t.text == "<") return Comparator::Less;
  if (t.text == "<=") return Comparator::LessEqual;
  if (t.text == ">") return Comparator::Greater;
  if (t.text == ">=") return Comparator::GreaterEqual;
  if (t.text == "=" || t.text == "==") return Comparator::Equal;
  return std::nullopt;
}

// Shared term/quantity grammar of the .tsc view language and formula text.
class ExprParser {
 public:
  ExprParser(Lexer& lex, const std::map<std::string, double>& constants) : lex_(lex), constants_(constants) {}

  Quantity quantity() {
    const bool negative = lex_.accept("-");
    Quantity q;
    if (lex_.peek().kind == TokenKind::Number) {
      q.value = to_double(lex_.next(), lex_);
    } else if (lex_.peek().kind == TokenKind::Ident) {
      const Token name = lex_.peek();
      auto it = constants_.find(name.text);
      if (it == constants_.end()) lex_.fail("unknown constant " + name.text);
      lex_.next();
      q.value = it->second;
      q.symbol = name.text;
    } else {
      lex_.fail("expected number or constant, found " + Lexer::describe(lex_.peek()));
    }
    if (negative) q.value = -q.value;
    return q;
  }

  AttrPath attr_path() {
    AttrPath p;
    p.variable = lex_.expect_ident("variable").text;
    lex_.expect(".");
    p.path = lex_.expect_ident("attribute").text;
    while (lex_.is(".")) {
      lex_.next();
      p.path += "." + lex_.expect_ident("attribute").text;
    }
    return p;
  }

  AnchorRef anchor_ref() {
    AnchorRef a;
    a.variable = lex_.expect_ident("variable").text;
    lex_.expect(".");
    a.anchor = lex_.expect_ident("anchor").text;
    return a;
  }

  bool at_ref() const { return lex_.peek().kind == TokenKind::Ident && lex_.peek2().text == "."; }

  TermExpr term() {
    TermExpr t;
    if (at_ref()) {
      t.ref = attr_path();
      if (lex_.accept("+")) {
        t.offset = quantity();
      } else if (lex_.accept("-")) {
        t.offset = quantity();
        t.offset.value = -t.offset.value;
      }
      return t;
    }
    if (lex_.peek().kind == TokenKind::Ident && (lex_.is("true") || lex_.is("false"))) {
      t.offset.value = lex_.next().text == "true" ? 1.0 : 0.0;
      return t;
    }
    t.offset = quantity();
    if (lex_.accept("+")) t.ref = attr_path();
    return t;
  }

  Comparator comparator() {
    auto c = comparator_of(lex_.peek());
    if (!c) lex_.fail("expected comparator, found " + Lexer::describe(lex_.peek()));
    lex_.next();
    return *c;
  }

  AttributeConstraint constraint() {
    AttributeConstraint c;
    c.lhs = term();
    c.cmp = comparator();
    c.rhs = term();
    return c;
  }

 private:
  Lexer& lex_;
  const std::map<std::string, double>& constants_;
};

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : lex_(text), expr_(lex_, bundle_.constants) {}

  SpecBundle parse() {
    if (lex_.at_end()) throw ParseError(1, 1, "empty specification");
    while (!lex_.at_end()) item();
    return std::move(bundle_);
  }

 private:
  bool keyword(std::string_view kw) const {
    return lex_.peek().kind == TokenKind::Ident && lex_.peek().text == kw && lex_.peek2().text != ".";
  }

  Token fresh_name(std::set<std::string>& seen, std::string_view what) {
    const Token name = lex_.expect_ident(what);
    if (!seen.insert(name.text).second) throw ParseError(name.line, name.column, "duplicate name " + name.text);
    return name;
  }

  void item() {
    if (lex_.accept("const")) {
      const Token name = fresh_name(const_names_, "constant name");
      lex_.expect("=");
      bundle_.constants[name.text] = expr_.quantity().value;
    } else if (lex_.accept("objectmodel")) {
      object_model();
    } else if (lex_.accept("symbols")) {
      symbols();
    } else if (lex_.accept("context")) {
      const Token name = fresh_name(chart_names_, "chart name");
      SequenceChart chart;
      chart.nodes.push_back({view_block()});
      bundle_.charts[name.text] = std::move(chart);
      bundle_.contexts.insert(name.text);
    } else if (lex_.accept("chart")) {
      const Token name = fresh_name(chart_names_, "chart name");
      SequenceChart chart;
      lex_.expect("{");
      while (!lex_.accept("}")) {
        lex_.expect("node");
        chart.nodes.push_back({view_block()});
      }
      bundle_.charts[name.text] = std::move(chart);
    } else if (lex_.accept("explanation")) {
      explanation();
    } else {
      lex_.fail("expected 'const', 'objectmodel', 'symbols', 'context', 'chart' or 'explanation', found " +
                Lexer::describe(lex_.peek()));
    }
  }

  std::string type_name() {
    if (lex_.accept("set")) return "set " + lex_.expect_ident("type").text;
    return lex_.expect_ident("type").text;
  }

  void object_model() {
    ObjectModel& om = bundle_.object_model;
    lex_.expect("{");
    while (!lex_.accept("}")) {
      if (lex_.accept("enum")) {
        EnumDecl e{fresh_name(type_names_, "enumeration name").text, {}};
        lex_.expect("{");
        do {
          e.literals.push_back(lex_.expect_ident("literal").text);
        } while (lex_.accept(","));
        lex_.expect("}");
        om.enums.push_back(std::move(e));
      } else if (lex_.accept("kind")) {
        ObjectKind k{fresh_name(type_names_, "kind name").text, {}};
        lex_.expect("{");
        while (!lex_.accept("}")) {
          AttributeDecl a;
          a.name = lex_.expect_ident("attribute name").text;
          lex_.expect(":");
          a.type = type_name();
          if (lex_.is("[")) {
            lex_.next();
            a.unit = lex_.raw_until(']');
          }
          k.attributes.push_back(std::move(a));
        }
        om.kinds.push_back(std::move(k));
      } else if (lex_.is("function") || lex_.is("predicate")) {
        const bool is_function = lex_.next().text == "function";
        Signature s;
        s.name = lex_.expect_ident("signature name").text;
        lex_.expect("(");
        if (!lex_.is(")")) {
          do {
            s.parameters.push_back(type_name());
          } while (lex_.accept(","));
        }
        lex_.expect(")");
        if (is_function) {
          lex_.expect(":");
          s.result = type_name();
          om.functions.push_back(std::move(s));
        } else {
          om.predicates.push_back(std::move(s));
        }
      } else {
        lex_.fail("expected 'enum', 'kind', 'function' or 'predicate', found " + Lexer::describe(lex_.peek()));
      }
    }
  }

  void symbols() {
    lex_.expect("{");
    while (!lex_.accept("}")) {
      lex_.expect("symbol");
      const Token name = fresh_name(symbol_names_, "symbol name");
      Symbol s;
      lex_.expect(":");
      s.kind = lex_.expect_ident("kind").text;
      lex_.expect("{");
      while (!lex_.accept("}")) {
        lex_.expect("anchor");
        Anchor a;
        a.name = lex_.expect_ident("anchor name").text;
        if (lex_.accept("point")) a.mode = AnchorMode::Point;
        else if (lex_.accept("line")) a.mode = AnchorMode::LineFixedY;
        else lex_.fail("expected 'point' or 'line', found " + Lexer::describe(lex_.peek()));
        a.attribute = lex_.expect_ident("attribute").text;
        s.anchors.push_back(std::move(a));
      }
      bundle_.dictionary.entries[name.text] = std::move(s);
    }
  }

  Region band_region() {
    lex_.expect("band");
    lex_.expect("(");
    Region r;
    r.lower = expr_.anchor_ref();
    lex_.expect(",");
    r.upper = expr_.anchor_ref();
    lex_.expect(")");
    return r;
  }

  SpatialView view_block() {
    SpatialView v;
    lex_.expect("{");
    while (!lex_.accept("}")) {
      if (lex_.at_end()) lex_.fail("expected '}', found end of input");
      if (keyword("place")) {
        lex_.next();
        Placement p;
        p.variable = lex_.expect_ident("variable").text;
        lex_.expect(":");
        p.symbol = lex_.expect_ident("symbol").text;
        v.placements.push_back(std::move(p));
      } else if (keyword("order")) {
        lex_.next();
        Ordering o;
        o.before = lex_.expect_ident("variable").text;
        if (lex_.accept("<")) o.strict = true;
        else if (lex_.accept("<=")) o.strict = false;
        else lex_.fail("expected '<' or '<=', found " + Lexer::describe(lex_.peek()));
        o.after = lex_.expect_ident("variable").text;
        v.orderings.push_back(std::move(o));
      } else if (keyword("in_band")) {
        lex_.next();
        lex_.expect("(");
        BandMembership b;
        b.variable = lex_.expect_ident("variable").text;
        lex_.expect(",");
        b.lower = expr_.anchor_ref();
        lex_.expect(",");
        b.upper = expr_.anchor_ref();
        lex_.expect(")");
        v.bands.push_back(std::move(b));
      } else if (keyword("distance")) {
        lex_.next();
        lex_.expect("(");
        DistanceConstraint d;
        d.from = expr_.anchor_ref();
        lex_.expect(",");
        d.to = expr_.anchor_ref();
        lex_.expect(")");
        d.cmp = expr_.comparator();
        d.metres = expr_.quantity();
        v.distances.push_back(std::move(d));
      } else if (keyword("nowhere")) {
        lex_.next();
        NowhereBox n;
        n.kind = lex_.expect_ident("kind").text;
        if (lex_.accept("in")) n.region = band_region();
        if (lex_.accept("within")) n.range = expr_.quantity();
        if (lex_.accept("of")) n.reference = lex_.expect_ident("variable").text;
        v.nowhere.push_back(std::move(n));
      } else if (keyword("somewhere")) {
        lex_.next();
        SomewhereBox s;
        lex_.expect("(");
        do {
          s.variables.push_back(lex_.expect_ident("variable").text);
        } while (lex_.accept(","));
        lex_.expect(")");
        lex_.expect("in");
        s.region = band_region();
        v.somewhere.push_back(std::move(s));
      } else {
        v.constraints.push_back(expr_.constraint());
      }
    }
    return v;
  }

  void explanation() {
    const Token name = fresh_name(explanation_names_, "explanation name");
    Explanation e;
    e.id = name.text;
    lex_.expect("{");
    bool has_context = false;
    while (!lex_.accept("}")) {
      if (lex_.accept("context")) {
        if (has_context) lex_.fail("explanation " + e.id + " declares more than one context");
        e.context = lex_.expect_ident("chart name").text;
        has_context = true;
      } else if (lex_.is("expectable") || lex_.is("unexpectable")) {
        const bool expectable = lex_.next().text == "expectable";
        ManoeuvreRef m;
        m.chart = lex_.expect_ident("chart name").text;
        if (lex_.peek().kind == TokenKind::String) m.label = lex_.next().text;
        (expectable ? e.expectable : e.unexpectable).push_back(std::move(m));
      } else {
        lex_.fail("expected 'context', 'expectable' or 'unexpectable', found " + Lexer::describe(lex_.peek()));
      }
    }
    if (!has_context) throw ParseError(name.line, name.column, "explanation " + e.id + " lacks a context");
    bundle_.explanations[e.id] = std::move(e);
  }

  SpecBundle bundle_;
  Lexer lex_;
  ExprParser expr_;
  std::set<std::string> const_names_, type_names_, symbol_names_, chart_names_, explanation_names_;
};

// --- serialization ---------------------------------------------------------

std::string quantity_text(const Quantity& q) {
  if (q.symbol.empty()) return format_number(q.value);
  return q.value < 0.0 ? "-" + q.symbol : q.symbol;
}

std::string term_text(const TermExpr& t) {
  if (!t.ref) return quantity_text(t.offset);
  std::string s = t.ref->variable + "." + t.ref->path;
  if (!t.offset.symbol.empty() || t.offset.value != 0.0) {
    Quantity mag = t.offset;
    const bool negative = mag.value < 0.0;
    mag.value = negative ? -mag.value : mag.value;
    s += (negative ? " - " : " + ") + quantity_text(mag);
  }
  return s;
}

std::string anchor_text(const AnchorRef& a) { return a.variable + "." + a.anchor; }

std::string region_text(const Region& r) {
  return "band(" + anchor_text(r.lower) + ", " + anchor_text(r.upper) + ")";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write_view(std::ostream& out, const SpatialView& v, const std::string& indent) {
  for (const auto& p : v.placements) out << indent << "place " << p.variable << " : " << p.symbol << "\n";
  for (const auto& s : v.somewhere) {
    out << indent << "somewhere(";
    for (std::size_t i = 0; i < s.variables.size(); ++i) out << (i ? ", " : "") << s.variables[i];
    out << ") in " << region_text(s.region) << "\n";
  }
  for (const auto& b : v.bands)
    out << indent << "in_band(" << b.variable << ", " << anchor_text(b.lower) << ", " << anchor_text(b.upper) << ")\n";
  for (const auto& o : v.orderings)
    out << indent << "order " << o.before << (o.strict ? " < " : " <= ") << o.after << "\n";
  for (const auto& d : v.distances)
    out << indent << "distance(" << anchor_text(d.from) << ", " << anchor_text(d.to) << ") " << to_string(d.cmp) << " "
        << quantity_text(d.metres) << "\n";
  for (const auto& c : v.constraints)
    out << indent << term_text(c.lhs) << " " << to_string(c.cmp) << " " << term_text(c.rhs) << "\n";
  for (const auto& n : v.nowhere) {
    out << indent << "nowhere " << n.kind;
    if (n.region) out << " in " << region_text(*n.region);
    if (n.range) out << " within " << quantity_text(*n.range);
    if (!n.reference.empty()) out << " of " << n.reference;
    out << "\n";
  }
}

Term to_term(const TermExpr& e) {
  Term t;
  if (e.ref) t.ref = AttrRef{e.ref->variable, e.ref->path};
  t.offset = e.offset.value;
  return t;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

}  // namespace

SpecBundle parse_spec(std::string_view text) {
  SpecBundle bundle = SpecParser(text).parse();
  if (auto problems = validate_bundle(bundle); !problems.empty()) throw SpecTypeError(std::move(problems));
  return bundle;
}

SpecBundle load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::vector<std::string> validate_bundle(const SpecBundle& bundle) {
  std::vector<std::string> problems;
  for (const auto& v : validate_object_model(bundle.object_model)) problems.push_back(v.subject + ": " + v.message);
  for (const auto& v : validate_dictionary(bundle.dictionary, bundle.object_model))
    problems.push_back("symbol " + v.subject + ": " + v.message);
  for (const auto& [name, chart] : bundle.charts) {
    for (const auto& v : well_typed(chart, bundle.object_model, bundle.dictionary))
      problems.push_back("chart " + name + " node " + std::to_string(v.node + 1) + ": " + v.element + ": " +
                         v.message);
  }
  for (const auto& name : bundle.contexts) {
    auto it = bundle.charts.find(name);
    if (it == bundle.charts.end()) problems.push_back("context " + name + ": no such chart");
    else if (it->second.nodes.size() != 1) problems.push_back("context " + name + ": must be a single invariant node");
  }
  for (const auto& [id, e] : bundle.explanations) {
    const std::string where = "explanation " + id + ": ";
    if (!bundle.contexts.contains(e.context)) {
      problems.push_back(where + (bundle.charts.contains(e.context) ? "context " + e.context + " is not a basic chart"
                                                                     : "unknown chart " + e.context));
    }
    if (e.expectable.empty()) problems.push_back(where + "no expectable manoeuvre");
    if (e.unexpectable.empty()) problems.push_back(where + "no unexpectable manoeuvre");
    for (const auto* list : {&e.expectable, &e.unexpectable})
      for (const auto& m : *list)
        if (!bundle.charts.contains(m.chart)) problems.push_back(where + "unknown chart " + m.chart);
  }
  return problems;
}

std::string serialize_spec(const SpecBundle& b) {
  std::ostringstream out;
  for (const auto& [name, value] : b.constants) out << "const " << name << " = " << format_number(value) << "\n";
  if (!b.constants.empty()) out << "\n";

  const ObjectModel& om = b.object_model;
  out << "objectmodel {\n";
  for (const auto& e : om.enums) out << "  enum " << e.name << " { " << join(e.literals) << " }\n";
  for (const auto& k : om.kinds) {
    out << "  kind " << k.name << " {\n";
    for (const auto& a : k.attributes) {
      out << "    " << a.name << " : " << a.type;
      if (!a.unit.empty()) out << " [" << a.unit << "]";
      out << "\n";
    }
    out << "  }\n";
  }
  for (const auto& f : om.functions) out << "  function " << f.name << "(" << join(f.parameters) << ") : " << f.result << "\n";
  for (const auto& p : om.predicates) out << "  predicate " << p.name << "(" << join(p.parameters) << ")\n";
  out << "}\n\nsymbols {\n";
  for (const auto& [name, s] : b.dictionary.entries) {
    out << "  symbol " << name << " : " << s.kind << " {\n";
    for (const auto& a : s.anchors)
      out << "    anchor " << a.name << (a.mode == AnchorMode::Point ? " point " : " line ") << a.attribute << "\n";
    out << "  }\n";
  }
  out << "}\n";

  for (const auto& [name, chart] : b.charts) {
    out << "\n";
    if (b.contexts.contains(name) && chart.nodes.size() == 1) {
      out << "context " << name << " {\n";
      write_view(out, chart.nodes.front().view, "  ");
      out << "}\n";
      continue;
    }
    out << "chart " << name << " {\n";
    for (const auto& node : chart.nodes) {
      out << "  node {\n";
      write_view(out, node.view, "    ");
      out << "  }\n";
    }
    out << "}\n";
  }

  for (const auto& [id, e] : b.explanations) {
    out << "\nexplanation " << id << " {\n  context " << e.context << "\n";
    for (const auto& m : e.expectable) {
      out << "  expectable " << m.chart;
      if (!m.label.empty()) out << " " << quoted(m.label);
      out << "\n";
    }
    for (const auto& m : e.unexpectable) {
      out << "  unexpectable " << m.chart;
      if (!m.label.empty()) out << " " << quoted(m.label);
      out << "\n";
    }
    out << "}\n";
  }
  return out.str();
}

NodeFormulaSequence parse_formula_sequence(std::string_view text, const std::map<std::string, double>& constants) {
  Lexer lex(text);
  ExprParser expr(lex, constants);
  NodeFormulaSequence seq;
  seq.nodes.emplace_back();
  while (!lex.at_end()) {
    if (lex.accept(";")) {
      seq.nodes.emplace_back();
      continue;
    }
    if (lex.accept("&&")) continue;
    Formula& f = seq.nodes.back();
    if (lex.is("true") && (lex.peek2().kind == TokenKind::End || lex.peek2().text == ";")) {
      lex.next();  // the empty conjunction
      continue;
    }
    // variable.inRange(side[, range]) = {}
    if (lex.peek().kind == TokenKind::Ident && lex.peek2().text == ".") {
      Lexer probe = lex;
      probe.next();
      probe.next();
      if (probe.is("inRange")) {
        RangeEmpty r;
        r.variable = lex.next().text;
        lex.next();
        lex.next();
        lex.expect("(");
        auto side = parse_side(lex.expect_ident("side").text);
        if (!side) lex.fail("expected 'left' or 'right'");
        r.side = *side;
        if (lex.accept(",")) r.range_m = expr.quantity().value;
        lex.expect(")");
        lex.expect("=");
        lex.expect("{");
        lex.expect("}");
        f.conjuncts.push_back(r);
        continue;
      }
    }
    const AttributeConstraint c = expr.constraint();
    const Comparison first{to_term(c.lhs), c.cmp, to_term(c.rhs)};
    if (!comparator_of(lex.peek())) {
      f.conjuncts.push_back(first);
      continue;
    }
    // Chained `a < b < c`: a band atom when all three are plain references.
    const Comparison second{first.rhs, expr.comparator(), to_term(expr.term())};
    const bool band = first.cmp == Comparator::Less && second.cmp == Comparator::Less && first.lhs.ref &&
                      first.rhs.ref && second.rhs.ref && first.lhs.offset == 0.0 && first.rhs.offset == 0.0 &&
                      second.rhs.offset == 0.0;
    if (band) {
      f.conjuncts.push_back(BandAtom{*first.rhs.ref, *first.lhs.ref, *second.rhs.ref});
    } else {
      f.conjuncts.push_back(first);
      f.conjuncts.push_back(second);
    }
  }
  return seq;
}

}  // namespace tsc
