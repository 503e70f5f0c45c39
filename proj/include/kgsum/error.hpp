#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgsum {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Argument outside the domain of an encoding or scoring function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed rule structure (e.g. nesting beyond the supported depth).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgsum
