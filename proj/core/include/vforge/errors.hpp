#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vforge {

/// Base for every error thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed mathematical failure. The reason string is part of the CLI contract.
enum class FailureKind {
  ValueNotInGroup,
  ResidueNotInField,
  NotInMaximalIdeal,
  PreconditionViolated,
};

const char* to_string(FailureKind kind);

class MathError : public Error {
 public:
  MathError(FailureKind kind, const std::string& detail)
      : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

  FailureKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  FailureKind kind_;
  std::string detail_;
};

/// Violated step or operation precondition; `rule` names the invariant.
class PreconditionError : public MathError {
 public:
  PreconditionError(const std::string& rule, const std::string& detail)
      : MathError(FailureKind::PreconditionViolated, rule + ": " + detail), rule_(rule) {}

  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// An invariant that should always hold was violated (e.g. step cap overflow).
class InternalError : public Error {
 public:
  using Error::Error;
};

class StepCapExceeded : public InternalError {
 public:
  StepCapExceeded(std::size_t cap, std::string trace)
      : InternalError("step cap of " + std::to_string(cap) + " exceeded"), trace_(std::move(trace)) {}

  const std::string& trace() const { return trace_; }

 private:
  std::string trace_;
};

class Cancelled : public Error {
 public:
  Cancelled() : Error("operation cancelled") {}
};

}  // namespace vforge
