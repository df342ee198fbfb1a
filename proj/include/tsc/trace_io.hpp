#pragma once

#include "tsc/object_model.hpp"

#include <iosfwd>
#include <string>

namespace tsc {

// NDJSON traces: one sample per line,
//   {"t": 0.05, "objects": [{"id": "ego", "kind": "Car", "attrs": {...}}]}
// with positions as {"x": .., "y": ..}. Doubles are written with enough digits
// to read back bit-exact; integers and booleans keep their JSON type.

void write_trace(std::ostream& out, const Trace& trace);
void write_trace(const Trace& trace, const std::string& path);

std::string situation_to_json(const ConcreteSituation& sigma);

// Throws TraceFormatError with the 1-based line of the offending record.
// The sample rate is inferred from the median timestamp spacing.
Trace read_trace(std::istream& in);
Trace read_trace(const std::string& path);

}  // namespace tsc
