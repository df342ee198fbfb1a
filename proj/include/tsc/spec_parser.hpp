#pragma once

#include "tsc/chart.hpp"
#include "tsc/error.hpp"
#include "tsc/formula.hpp"
#include "tsc/object_model.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tsc {

// Everything one .tsc document declares.
struct SpecBundle {
  std::map<std::string, double> constants;
  ObjectModel object_model;
  SymbolDictionary dictionary;
  std::map<std::string, SequenceChart> charts;
  // Charts declared as basic-chart contexts (`context NAME { ... }`); these
  // may exist without a linked explanation.
  std::set<std::string> contexts;
  std::map<std::string, Explanation> explanations;

  bool operator==(const SpecBundle&) const = default;
};

// Well-typedness or linkage problems found after a syntactically valid parse.
class SpecTypeError : public Error {
 public:
  explicit SpecTypeError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Throws ParseError (syntax, duplicate names, empty input) or SpecTypeError.
SpecBundle parse_spec(std::string_view text);
SpecBundle load_spec(const std::string& path);

// Problems that make a bundle invalid: object model, dictionary, chart
// typing and explanation linkage. Empty when valid.
std::vector<std::string> validate_bundle(const SpecBundle& bundle);

std::string serialize_spec(const SpecBundle& bundle);

// Formula text: conjuncts separated by whitespace (optionally `&&`), nodes
// separated by `;`. Identifiers without a dot resolve against `constants`;
// `x.inRange(side[, range]) = {}` denotes range emptiness.
NodeFormulaSequence parse_formula_sequence(std::string_view text, const std::map<std::string, double>& constants = {});

}  // namespace tsc
