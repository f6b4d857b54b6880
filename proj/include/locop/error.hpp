#pragma once

#include <stdexcept>
#include <string>

namespace locop {

/// Broad failure class; the CLI maps each to an exit code.
enum class ErrorKind {
  invalid_argument,
  config,
  numeric_guard,
  io,
  convergence,
};

/// Error carrying a stable machine-readable code (e.g. "tau.range") and,
/// for configuration problems, the JSON path that triggered it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message,
        std::string path = {})
      : std::runtime_error(code + ": " + message + (path.empty() ? "" : " (at " + path + ")")),
        kind_(kind),
        code_(std::move(code)),
        path_(std::move(path)) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& code() const noexcept { return code_; }
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string code_;
  std::string path_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw Error(ErrorKind::invalid_argument, std::move(code), message);
}

}  // namespace locop
