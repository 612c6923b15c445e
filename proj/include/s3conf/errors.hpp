#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace s3conf {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration (grid exactness, band limit, flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (length mismatch, non-unit point).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Non-finite data encountered at a quadrature node.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

// A value left the domain of an operation, e.g. a negative power of a
// non-positive sample.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t node)
      : Error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

// A field violates u > 0 or sigma_1(u) > 0 on the grid.
class FeasibilityError : public Error {
 public:
  FeasibilityError(std::string constraint, std::size_t node, double value)
      : Error("infeasible field: " + constraint + " violated at node " +
              std::to_string(node) + " (value " + std::to_string(value) + ")"),
        constraint_(std::move(constraint)),
        node_(node),
        value_(value) {}
  const std::string& constraint() const { return constraint_; }
  std::size_t node() const { return node_; }
  double value() const { return value_; }

 private:
  std::string constraint_;
  std::size_t node_;
  double value_;
};

}  // namespace s3conf
