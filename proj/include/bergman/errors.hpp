#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bergman {

/// Unknown model selector, malformed config file, inconsistent sampling plan.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration exceeded its element cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(std::size_t cap)
      : std::runtime_error("element cap " + std::to_string(cap) + " exceeded"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

}  // namespace bergman
