#pragma once

#include <stdexcept>
#include <string>

namespace ppmbench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse failures carry the byte offset of the offending input.
struct ParseError : Error {
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"), position(position) {}
  explicit ParseError(const std::string& message) : Error(message), position(0) {}
  std::size_t position;
};

}  // namespace ppmbench
