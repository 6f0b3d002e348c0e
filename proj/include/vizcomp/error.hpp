#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vizcomp {

enum class ErrorCode {
  KindIsNone,
  TableMismatch,
  UnknownPart,
  UnknownItem,
  InvalidEvent,
  NotAdmissible,
  UnmatchedItems,
  NotPcp,
  BadAxisIndex,
  RegionNotActive,
  SeedUnmatched,
  NoSuchAxis,
  WrongTrigger,
  ParseError,
  OrderError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

/// Base error for every failure the engine reports. The code is stable and
/// meant to be matched on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed input. `line` is 1-based for line-oriented formats and 0 otherwise;
/// `offset` is the byte offset reported by the JSON reader when available.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t offset = 0)
      : Error(ErrorCode::ParseError, message), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

class OrderError : public Error {
 public:
  OrderError(const std::string& message, std::size_t line)
      : Error(ErrorCode::OrderError, message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a cross-reference or invariant. `path` is a
/// JSON-pointer-like location such as `views[0].table`.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& message)
      : Error(ErrorCode::ValidationError, path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace vizcomp
