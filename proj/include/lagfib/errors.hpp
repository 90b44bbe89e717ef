#pragma once

#include <stdexcept>
#include <string>

namespace lagfib {

/// A gated operation refused to run because its stated precondition failed
/// (inadmissible frame, non-constant rank, cone input, ...). The CLI maps
/// this to exit code 2 with a diagnostic naming the module and reason.
class precondition_error : public std::runtime_error {
 public:
  precondition_error(std::string module, std::string reason)
      : std::runtime_error(module + ": " + reason), module_(std::move(module)), reason_(std::move(reason)) {}
  const std::string& module() const { return module_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string module_;
  std::string reason_;
};

/// Malformed input files or flag combinations. CLI exit code 1.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lagfib
