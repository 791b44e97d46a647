#include "mq/error.hpp"

namespace mq {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Format: return "format";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Size: return "size";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::Degenerate: return "degenerate-input";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace mq
