#pragma once

#include <stdexcept>
#include <string>

namespace scalenorm {

/// Broad error category, reported by the CLI in its error record.
enum class ErrorKind {
  invalid_argument,
  parse,
  structure,
  io,
  empty_input,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(message), kind_(kind), path_(std::move(path)) {}

  ErrorKind kind() const { return kind_; }
  /// File path or JSON pointer the error refers to; may be empty.
  const std::string& path() const { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

inline Error invalid_argument(const std::string& message) {
  return Error(ErrorKind::invalid_argument, message);
}

}  // namespace scalenorm
