#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linkanomaly {

// Malformed input record. Carries enough context to point at the offending
// line and field in a diagnostic.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, std::string reason)
      : std::runtime_error("line " + std::to_string(line) + ", field '" + field +
                           "': " + reason),
        line_(line),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string field_;
  std::string reason_;
};

// A post arrived earlier than the newest post already accepted for the same
// user, beyond the configured tolerance.
class StreamOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linkanomaly
