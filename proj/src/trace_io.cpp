#include "tsc/trace_io.hpp"

#include "tsc/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace tsc {

using nlohmann::ordered_json;

namespace {

ordered_json value_to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Vec2>) return ordered_json{{"x", x.x}, {"y", x.y}};
        else return x;
      },
      v);
}

ordered_json sample_to_json(const ConcreteSituation& sigma) {
  ordered_json objects = ordered_json::array();
  for (const auto& [id, state] : sigma.objects) {
    ordered_json attrs = ordered_json::object();
    for (const auto& [name, value] : state.attrs) attrs[name] = value_to_json(value);
    objects.push_back({{"id", id}, {"kind", state.kind}, {"attrs", std::move(attrs)}});
  }
  return {{"t", sigma.timestamp}, {"objects", std::move(objects)}};
}

Value value_from_json(const nlohmann::json& j, std::size_t line, const std::string& where) {
  switch (j.type()) {
    case nlohmann::json::value_t::boolean: return j.get<bool>();
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned: return j.get<std::int64_t>();
    case nlohmann::json::value_t::number_float: return j.get<double>();
    case nlohmann::json::value_t::string: return j.get<std::string>();
    case nlohmann::json::value_t::object:
      if (j.size() == 2 && j.contains("x") && j.contains("y") && j["x"].is_number() && j["y"].is_number())
        return Vec2{j["x"].get<double>(), j["y"].get<double>()};
      [[fallthrough]];
    default: throw TraceFormatError(line, "unsupported value for " + where);
  }
}

const nlohmann::json& field(const nlohmann::json& obj, const char* name, std::size_t line, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) throw TraceFormatError(line, where + " lacks \"" + name + "\"");
  return *it;
}

ConcreteSituation sample_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw TraceFormatError(line, "record is not a JSON object");
  ConcreteSituation sigma;
  const auto& t = field(j, "t", line, "record");
  if (!t.is_number()) throw TraceFormatError(line, "\"t\" is not a number");
  sigma.timestamp = t.get<double>();
  const auto& objects = field(j, "objects", line, "record");
  if (!objects.is_array()) throw TraceFormatError(line, "\"objects\" is not an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string where = "object " + std::to_string(i);
    if (!o.is_object()) throw TraceFormatError(line, where + " is not a JSON object");
    const auto& id = field(o, "id", line, where);
    const auto& kind = field(o, "kind", line, where);
    const auto& attrs = field(o, "attrs", line, where);
    if (!id.is_string() || !kind.is_string() || !attrs.is_object())
      throw TraceFormatError(line, where + " has mistyped id, kind or attrs");
    ObjectState state;
    state.kind = kind.get<std::string>();
    for (const auto& [name, value] : attrs.items())
      state.attrs[name] = value_from_json(value, line, id.get<std::string>() + "." + name);
    if (!sigma.objects.emplace(id.get<std::string>(), std::move(state)).second)
      throw TraceFormatError(line, "duplicate object id " + id.get<std::string>());
  }
  return sigma;
}

}  // namespace

std::string situation_to_json(const ConcreteSituation& sigma) { return sample_to_json(sigma).dump(); }

void write_trace(std::ostream& out, const Trace& trace) {
  for (const auto& s : trace.samples) out << sample_to_json(s).dump() << '\n';
}

void write_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_trace(out, trace);
  if (!out) throw Error("write failed: " + path);
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw TraceFormatError(line, std::string("invalid JSON: ") + e.what());
    }
    ConcreteSituation sigma = sample_from_json(j, line);
    if (!trace.samples.empty() && !(sigma.timestamp > trace.samples.back().timestamp))
      throw TraceFormatError(line, "non-monotone t");
    trace.samples.push_back(std::move(sigma));
  }
  if (trace.samples.size() >= 2) {
    std::vector<double> dt;
    for (std::size_t i = 1; i < trace.samples.size(); ++i)
      dt.push_back(trace.samples[i].timestamp - trace.samples[i - 1].timestamp);
    std::nth_element(dt.begin(), dt.begin() + dt.size() / 2, dt.end());
    const double rate = 1.0 / dt[dt.size() / 2];
    // Timestamps like i / 20 carry rounding noise; snap to a whole rate.
    trace.sample_rate = std::abs(rate - std::round(rate)) < 1e-6 ? std::round(rate) : rate;
  }
  return trace;
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_trace(in);
}

}  // namespace tsc
