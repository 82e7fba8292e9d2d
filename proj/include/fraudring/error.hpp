#pragma once

#include <stdexcept>
#include <string>

namespace fraudring {

/// Precondition violated by the caller (bad node id, invalid bounds, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stream could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is readable but structurally wrong (bad CSV header, bad config line).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request refused because the input exceeds a hard size guard.
class SizeLimitError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace fraudring
