#pragma once

#include <stdexcept>
#include <string>

namespace nsim {

// Error categories double as process exit codes in the CLI.
enum class ErrorKind {
  usage = 1,
  data = 2,
  infeasible = 3,
  internal = 4,
};

// Every failure carries a stable machine-readable code (snake_case) next to
// the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string code, const std::string& message) {
  throw Error(kind, std::move(code), message);
}

}  // namespace nsim
