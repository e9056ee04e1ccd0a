#pragma once

#include <stdexcept>
#include <string>

namespace quorum {

// Base class for everything this library throws.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input that violates a documented precondition or value range.
struct domain_error : error {
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// Malformed file content; carries the 1-based line number.
struct parse_error : error {
  parse_error(const std::string& msg, int line)
      : error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  int line;
};

// The same cell or item appears twice in a file.
struct duplicate_error : error {
  explicit duplicate_error(const std::string& msg) : error(msg) {}
};

}  // namespace quorum
