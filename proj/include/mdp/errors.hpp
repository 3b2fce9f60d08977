#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdp {

/// Rejected input: bad parameters, invalid geometry, precondition failure.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text that could not be parsed. `position` is a byte offset (0 if unknown).
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InvalidInput(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A numerical procedure could not reach its requested tolerance or budget.
class ToleranceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdp
