#pragma once

#include <stdexcept>
#include <string>

namespace mochlab {

/// Failure classes surfaced by the library. The CLI maps each onto its own
/// exit code, so keep the enumerators stable.
enum class ErrorKind {
  InvalidArgument,  // violated precondition on a numeric input
  GridMismatch,     // operands live on different grids
  Resolution,       // grid too coarse for the requested construction
  NonFinite,        // NaN/Inf in a field
  BlowUp,           // solver guard tripped
  Diffeomorphism,   // flow map lost monotonicity
  Io,               // file missing, unreadable or unwritable
  Format,           // malformed snapshot / config payload
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what,
                    ErrorKind kind = ErrorKind::InvalidArgument) {
  if (!cond) fail(kind, what);
}

}  // namespace mochlab
