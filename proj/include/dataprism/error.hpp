#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace dataprism {

/// Input violates a documented contract (bad schema, failed invariant,
/// inconsistent ids). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal diagnostics go through one process-wide handler; the default
// prints "warning: <msg>" to stderr.
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace dataprism
