#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsi {

// Each error kind maps onto one process exit code of the command-line tool.
enum class ErrorKind { usage = 1, io = 2, validation = 3, internal = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

// Raised when a traversal needs more postponed nodes than the stack holds.
class StackOverflowError : public Error {
 public:
  static constexpr std::size_t kUnknownSegment = static_cast<std::size_t>(-1);

  explicit StackOverflowError(std::size_t capacity, std::size_t segment = kUnknownSegment)
      : Error(ErrorKind::internal, message(capacity, segment)),
        capacity_(capacity),
        segment_(segment) {}

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t segment() const noexcept { return segment_; }

 private:
  static std::string message(std::size_t capacity, std::size_t segment) {
    std::string msg = "traversal stack overflow (capacity " + std::to_string(capacity) + ")";
    if (segment != kUnknownSegment) msg += " while querying segment " + std::to_string(segment);
    return msg;
  }

  std::size_t capacity_;
  std::size_t segment_;
};

}  // namespace rsi
