#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cemsim {

/// Invalid configuration or scenario input. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Query time outside the covered range of a recorded series.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Content that parses but violates a data invariant.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A charging problem whose demand cannot be covered.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Failure inside a component during a simulator step. Maps to CLI exit code 2.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::string component, std::size_t step_index, const std::string& cause)
      : std::runtime_error(component + " failed at step " + std::to_string(step_index) + ": " +
                           cause),
        component_(std::move(component)),
        step_index_(step_index) {}
  const std::string& component() const noexcept { return component_; }
  std::size_t step_index() const noexcept { return step_index_; }

 private:
  std::string component_;
  std::size_t step_index_;
};

}  // namespace cemsim
