#pragma once

#include <stdexcept>
#include <string>

namespace supergeo {

// Error kinds map one-to-one onto the machine-readable "error" field emitted
// by the CLI and onto its exit codes (Usage -> 2, everything else -> 1).
enum class ErrorKind {
  Dimension,   // mismatched generator counts, coordinate counts, block shapes
  Parse,       // expression or JSON syntax problems, with position info
  Domain,      // division by zero body, log/sqrt of a non-positive body
  Degeneracy,  // a sign determinant below tolerance, degenerate zero, seam clash
  Validation,  // an atlas/morphism consistency check failed hard
  Usage,       // bad CLI arguments or an unknown model name
  Io,          // unreadable file
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace supergeo
