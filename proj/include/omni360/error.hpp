#pragma once

#include <stdexcept>
#include <string>

namespace omni360 {

// Error categories. The numeric values are shared with the C API status codes
// (see omni360.h), so keep them in sync.
enum class ErrorKind : int {
  kDomain = 1,          // argument outside the mathematical domain
  kContract = 2,        // precondition / shape mismatch between arguments
  kIo = 3,              // file system failure or truncated input
  kData = 4,            // malformed content (e.g. 10-bit sample > 1023)
  kDisjointCurves = 5,  // RD curves without overlap on the integration axis
  kInsufficientData = 6,
  kConfig = 7,
  kCodec = 8,
  kPipelineState = 9,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

#define OMNI360_REQUIRE(cond, kind, msg)             \
  do {                                               \
    if (!(cond)) ::omni360::raise((kind), (msg));    \
  } while (0)

}  // namespace omni360
