#pragma once

// Reference evaluators written against the raw situation maps, sharing no code
// with the compiler or monitor so that agreement is meaningful.

#include "tsc/object_model.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

inline double num(const tsc::ConcreteSituation& s, const std::string& id, const std::string& attr) {
  const auto& attrs = s.objects.at(id).attrs;
  auto dot = attr.find('.');
  if (dot != std::string::npos) {
    const auto& p = std::get<tsc::Vec2>(attrs.at(attr.substr(0, dot)));
    return attr.substr(dot + 1) == "x" ? p.x : p.y;
  }
  const auto& v = attrs.at(attr);
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<bool>(v) ? 1.0 : 0.0;
}

// No other car in the left lane within 50 m of ego; vacuous when ego is
// already left of the marking.
inline bool left_lane_clear(const tsc::ConcreteSituation& s) {
  const double y_m = num(s, "lane", "yM"), y_l = num(s, "lane", "yL");
  if (num(s, "ego", "pos.y") >= y_m) return true;
  for (const auto& [id, o] : s.objects) {
    if (id == "ego" || o.kind != "Car") continue;
    const double y = num(s, id, "pos.y");
    if (y > y_m && y < y_l && std::abs(num(s, id, "pos.x") - num(s, "ego", "pos.x")) <= 50.0) return false;
  }
  return true;
}

// The four phase contexts, hand-written from their prose descriptions.
inline std::map<std::string, bool> phases(const tsc::ConcreteSituation& s) {
  const double y_r = num(s, "lane", "yR"), y_m = num(s, "lane", "yM"), y_l = num(s, "lane", "yL");
  const double ex = num(s, "ego", "pos.x"), ey = num(s, "ego", "pos.y"), ev = num(s, "ego", "v");
  const double ox = num(s, "other", "pos.x"), oy = num(s, "other", "pos.y"), ov = num(s, "other", "v");
  const bool ind = num(s, "ego", "indicators_left") != 0.0;
  const bool ego_right = y_r < ey && ey < y_m, ego_left = y_m < ey && ey < y_l, ego_road = y_r < ey && ey < y_l;
  const bool other_right = y_r < oy && oy < y_m;
  const double gap = ox - ex;
  return {
      {"S1", ego_right && other_right && gap > 25.0 && ev > ov && !ind && left_lane_clear(s)},
      {"S2", ego_right && other_right && gap > 0.0 && gap <= 25.0 && ev > ov && !ind && left_lane_clear(s)},
      {"S3", ego_road && other_right && gap > 0.0 && ind},
      {"S4", ego_left && other_right && gap >= 0.0 && ev > ov && !ind},
  };
}

// Golden formula files: one or more conjuncts per line joined by `&&`, nodes
// separated by a trailing `;`, `#` comments. Variables bind by identity.
class Golden {
 public:
  using Atom = std::function<bool(const tsc::ConcreteSituation&)>;

  static Golden load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  static Golden parse(const std::string& text) {
    Golden g;
    g.nodes_.emplace_back();
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      bool ends_node = false;
      if (auto semi = line.find(';'); semi != std::string::npos) {
        ends_node = true;
        line.erase(semi);
      }
      std::size_t from = 0;
      while (true) {
        auto amp = line.find("&&", from);
        g.nodes_.back().push_back(atom(line.substr(from, amp == std::string::npos ? std::string::npos : amp - from)));
        if (amp == std::string::npos) break;
        from = amp + 2;
      }
      if (ends_node) g.nodes_.emplace_back();
    }
    return g;
  }

  std::size_t size() const { return nodes_.size(); }

  bool holds(std::size_t node, const tsc::ConcreteSituation& s) const {
    for (const auto& a : nodes_.at(node))
      if (!a(s)) return false;
    return true;
  }

 private:
  static double constant(const std::string& word) {
    if (word == "gap_trigger") return 25.0;
    if (word == "safe_dist") return 30.0;
    return std::stod(word);
  }

  // "a.b + k" or "a.b" or "k" as (variable, path, offset).
  struct Side {
    std::string var, path;
    double offset = 0.0;
  };

  static Side side(std::istringstream& words) {
    Side out;
    std::string w;
    words >> w;
    if (auto dot = w.find('.'); dot != std::string::npos && !std::isdigit(static_cast<unsigned char>(w[0]))) {
      out.var = w.substr(0, dot);
      out.path = w.substr(dot + 1);
    } else {
      out.offset = constant(w);
    }
    if (words.peek() == ' ') {
      auto pos = words.tellg();
      std::string op;
      words >> op;
      if (op == "+" || op == "-") {
        std::string k;
        words >> k;
        out.offset += (op == "+" ? 1 : -1) * constant(k);
      } else {
        words.seekg(pos);
      }
    }
    return out;
  }

  static double value(const Side& sd, const tsc::ConcreteSituation& s) {
    return (sd.var.empty() ? 0.0 : num(s, sd.var, sd.path)) + sd.offset;
  }

  static Atom atom(const std::string& text) {
    if (text.find("inRange(left)") != std::string::npos) return left_lane_clear;
    std::istringstream words(text);
    Side lhs = side(words);
    std::string op;
    words >> op;
    Side rhs = side(words);
    return [lhs, op, rhs](const tsc::ConcreteSituation& s) {
      const double a = value(lhs, s), b = value(rhs, s);
      if (op == "<") return a < b;
      if (op == "<=") return a <= b;
      if (op == ">") return a > b;
      if (op == ">=") return a >= b;
      if (op == "=") return a == b;
      throw std::runtime_error("unknown comparator " + op);
    };
  }

  std::vector<std::vector<Atom>> nodes_;
};

// Exhaustive split enumeration: node i occupies a block of at least two
// samples, blocks are consecutive and cover [b, e]. Returns the
// lexicographically smallest split vector (start of nodes 2..k).
inline std::optional<std::vector<std::size_t>> brute_force_match(const std::vector<std::vector<bool>>& truth,
                                                                  std::size_t b, std::size_t e) {
  const std::size_t k = truth.size();
  std::vector<std::size_t> starts(k);
  std::optional<std::vector<std::size_t>> best;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t node, std::size_t begin) {
    if (best) return;
    starts[node] = begin;
    if (node + 1 == k) {
      if (e < begin + 1) return;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t end = i + 1 < k ? starts[i + 1] - 1 : e;
        for (std::size_t j = starts[i]; j <= end; ++j)
          if (!truth[i][j]) return;
      }
      best = std::vector<std::size_t>(starts.begin() + 1, starts.end());
      return;
    }
    for (std::size_t next = begin + 2; next <= e; ++next) rec(node + 1, next);
  };
  if (k > 0 && e >= b) rec(0, b);
  return best;
}

}  // namespace oracle
