#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lifshitz {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative n, zeta <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Data that violates a type invariant (ordering, passivity, too few points).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MergeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Numerical integration that failed to meet its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : Error(what + " (estimate " + std::to_string(estimate) + ", error bound " +
              std::to_string(error_bound) + ")"),
        estimate_(estimate),
        error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// Iterative minimizer that ran out of iterations. Carries the best point seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::string trace = {})
      : Error(what), trace_(std::move(trace)) {}
  const std::string& trace() const noexcept { return trace_; }

 private:
  std::string trace_;
};

}  // namespace lifshitz
