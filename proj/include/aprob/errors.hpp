#pragma once

#include <stdexcept>
#include <string>

namespace aprob {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain: p outside (0,1], unknown symbol,
// phrase shorter than two symbols, non-positive quantization step.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied object broke its contract, e.g. a candidate stream whose
// probabilities increase.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Neither continuation of the target has any program within the enumeration
// depth, so no prediction can be made.
class InsufficientDepth : public Error {
 public:
  InsufficientDepth(const std::string& what, unsigned depth) : Error(what), depth_(depth) {}
  unsigned depth() const noexcept { return depth_; }

 private:
  unsigned depth_;
};

// Malformed or unsupported document (model file, problem file, numeric text).
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aprob
