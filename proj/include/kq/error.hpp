#pragma once
#include <stdexcept>
#include <string>

namespace kq {

/// Error categories; the numeric values double as CLI exit codes where relevant.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument = 1,
    Config = 2,
    Invariant = 3,
    Precondition = 4,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string &msg) {
    if (!cond) fail(code, msg);
}

} // namespace kq
