#pragma once

#include <stdexcept>
#include <string>

namespace tbnpb {

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  io_failure = 3,
  parse_failure = 4,
  numeric_failure = 5,
  no_convergence = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace tbnpb
