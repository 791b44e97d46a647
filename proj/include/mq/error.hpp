#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mq {

enum class ErrorKind {
  Parse,          // malformed token in an input file
  Format,         // structurally invalid input (ragged rows, bad header)
  EmptyInput,
  Shape,          // inconsistent dimensions across inputs
  Size,           // counts outside an operation's precondition
  Parameter,
  UnsupportedDimension,
  Degenerate,     // input valid but geometrically degenerate
  Integrity,      // internal structure violated (e.g. filtration not face-closed)
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All library failures surface as mq::Error; the CLI maps them to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Same error with `context: ` prepended to the message.
  Error annotated(std::string_view context) const {
    return Error(kind_, std::string(context) + ": " + what());
  }

 private:
  ErrorKind kind_;
};

}  // namespace mq
