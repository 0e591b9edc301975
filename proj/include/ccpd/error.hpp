#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccpd {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  enum class Kind { DanglingDiacritic, ConflictingMarks };

  ParseError(Kind kind, std::size_t position, std::size_t line = 0)
      : Error(describe(kind, position, line)), kind_(kind), position_(position), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  // Codepoint offset within the offending line.
  std::size_t position() const noexcept { return position_; }
  // 1-based line number when raised while reading a file, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

  ParseError at_line(std::size_t line) const { return ParseError(kind_, position_, line); }

 private:
  static std::string describe(Kind kind, std::size_t position, std::size_t line) {
    std::string msg = kind == Kind::DanglingDiacritic ? "dangling diacritic" : "conflicting diacritic marks";
    if (line != 0) msg += " on line " + std::to_string(line);
    msg += " at codepoint " + std::to_string(position);
    return msg;
  }

  Kind kind_;
  std::size_t position_;
  std::size_t line_;
};

// Two per-letter structures that must share a layout do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A replayed predictor was asked for a position it has no record of.
class MissingPosition : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus contains no sentences") {}
};

// A rate was requested over a set with no letters.
class EmptyScope : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Parameter values outside their documented domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccpd
