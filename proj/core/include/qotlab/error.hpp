#pragma once

#include <stdexcept>
#include <string>

namespace qot {

/// Raised when user-supplied data violates a documented invariant. The
/// message always starts with the name of the offending field.
class InvalidInput : public std::invalid_argument {
 public:
  InvalidInput(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An iterative method ran out of its iteration budget.
class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qot
