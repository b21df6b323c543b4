#pragma once

#include <stdexcept>
#include <string>

namespace speedscale {

// Instance or generator arguments that violate a precondition.
class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A policy produced a decision the simulator cannot execute, or a policy was
// paired with an instance it does not support.
class PolicyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MalformedTrajectory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force search was asked to exceed its configured limits.
class LimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simulator found no event within the livelock horizon.
class Livelock : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  // 1-based line of the offending token, 0 when unknown.
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace speedscale
