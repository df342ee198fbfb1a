#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax or semantic error in a .tsc document, located at line:column (1-based).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

// Unknown identity or attribute during lookup. Signals a wiring bug, not bad data.
class LookupError : public Error {
 public:
  using Error::Error;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

// No object of the situation can play a chart variable's role.
class BindingError : public EvalError {
 public:
  using EvalError::EvalError;
};

// Malformed record in an NDJSON trace or event file.
class TraceFormatError : public Error {
 public:
  TraceFormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

class SessionError : public Error {
 public:
  SessionError(std::size_t sample_index, const std::string& message)
      : Error("sample " + std::to_string(sample_index) + ": " + message), index_(sample_index) {}

  std::size_t sample_index() const { return index_; }

 private:
  std::size_t index_;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsc
