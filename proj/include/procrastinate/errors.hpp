#pragma once

#include <stdexcept>
#include <string>

namespace procrastinate {

/// Argument outside an operation's domain (t before release, b < a, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A job's remaining work can never be finished under its speed model.
class NeverCompletesError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested work does not fit into the available interval.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input is representable but outside what an algorithm supports
/// (e.g. a nonlazy job handed to LRTB).
class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad generator or policy parameters.
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed instance, schedule or trace file. Line and column are 1-based;
/// zero means unknown.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace procrastinate
