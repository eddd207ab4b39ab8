#pragma once

#include <stdexcept>
#include <string>

namespace condfield {

// Invalid arguments or violated operation preconditions.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration caps, table budgets, work budgets.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistency witnessed while rebuilding a field from a specification
// (probe, anchor, or enumeration-order disagreement).
class ReconstructError : public std::runtime_error {
 public:
  explicit ReconstructError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed model or configuration files.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace condfield
