#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orlicz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value outside an operation's domain (negative argument, bad range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Slope sequence that is not strictly positive and nonincreasing.
class InvalidSlopeSequence : public Error {
 public:
  InvalidSlopeSequence(std::size_t index, const std::string& why)
      : Error("slope sequence invalid at index " + std::to_string(index) + ": " + why), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// No sequence decreasing to 1 satisfies the renorming constraint.
class InfeasibleEta : public Error {
 public:
  InfeasibleEta(std::size_t k, double lower_bound, const std::string& why)
      : Error("eta construction infeasible: " + why), k_(k), lower_bound_(lower_bound) {}
  /// Index k of the binding constraint eta_k > (1 - 1/b_{k+1})^{-1}.
  std::size_t binding_index() const noexcept { return k_; }
  double lower_bound() const noexcept { return lower_bound_; }

 private:
  std::size_t k_;
  double lower_bound_;
};

/// Iterative search that exhausted its cap without meeting its condition.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace orlicz
