#pragma once

#include <stdexcept>
#include <string>

namespace agraph {

// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  Input,       // malformed file, unknown id, violated invariant
  Infeasible,  // no full deployment exists, or the goal cannot be reached
  Resource,    // a configured cap (e.g. shortest-plan count) was exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Input: return 2;
      case ErrorKind::Infeasible: return 3;
      case ErrorKind::Resource: return 4;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::Infeasible, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorKind::Resource, what) {}
};

}  // namespace agraph
