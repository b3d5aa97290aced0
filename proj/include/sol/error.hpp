#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sol {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data: bad tokens, negative feature ids, bad magic.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Text parse failure attributed to a 1-based line (or csv row) number.
class ParseError : public FormatError {
 public:
  ParseError(std::uint64_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

// Damaged binary cache; offset is the byte position where decoding failed.
class CorruptionError : public FormatError {
 public:
  CorruptionError(std::uint64_t offset, const std::string& what)
      : FormatError("byte offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sol
