#pragma once

#include <stdexcept>
#include <string>

namespace dwave {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain,
  NotConverged,
  Breakdown,
  Singular,
  Io,
};

/// Exception carried by every failing operation in the library. The code is
/// what the C API hands back to callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace dwave
