#pragma once

#include <stdexcept>
#include <string>

namespace refrontier {

// Exit-code family of a failure; the CLI maps these to 2, 3 and 4.
enum class ErrorKind { input, numeric, precondition };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed data: dimension mismatch, negative entries, bad schema.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

// An iterative routine failed to meet its tolerance.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

// Well-formed input that violates an operation's hypothesis.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::precondition, what) {}
};

// Two strategies whose vaccination targets overlap.
class NotDisjointError : public PreconditionError {
 public:
  explicit NotDisjointError(const std::string& what) : PreconditionError(what) {}
};

}  // namespace refrontier
