#pragma once

#include <stdexcept>
#include <string>

namespace rpnb {

enum class Status {
  Ok = 0,
  InvalidArgument = 1,
  DimensionMismatch = 2,
  InvalidClass = 3,
  InvalidBatch = 4,
  InvalidDataset = 5,
  ParseError = 6,
  IoError = 7,
  InsufficientData = 8,
  InvalidState = 9,
  Internal = 99,
};

// Library-wide exception; the C API boundary translates it to a status code.
class Error : public std::runtime_error {
 public:
  Error(Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  Status status() const noexcept { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status status, const std::string& msg) { throw Error(status, msg); }

}  // namespace rpnb
