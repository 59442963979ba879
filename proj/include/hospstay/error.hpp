#pragma once

#include <stdexcept>
#include <string>

namespace hospstay {

/// Broad failure classes; the C API maps each one to a status code.
enum class ErrorKind {
  InvalidArgument,  // caller-supplied configuration or parameter is invalid
  Data,             // input data cannot support the requested computation
  Io,               // file could not be opened, read or written
  Numeric,          // computation produced a non-finite result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hospstay
