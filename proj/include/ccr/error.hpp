#pragma once

#include <stdexcept>
#include <string>

namespace ccr {

struct SourceLoc {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
};

inline std::string to_string(const SourceLoc& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

/// Base of every diagnostic raised while reading or running a script.
class Error : public std::runtime_error {
 public:
  Error(const std::string& message, SourceLoc loc = {})
      : std::runtime_error(loc.known() ? to_string(loc) + ": " + message : message),
        loc_(loc),
        message_(message) {}

  const SourceLoc& loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  SourceLoc loc_;
  std::string message_;
};

/// Lexical or syntactic problem in the script text.
class SyntaxError : public Error {
 public:
  using Error::Error;
};

/// Evaluation or expansion problem (unbound name, bad arity, missing initialPose, ...).
class ScriptError : public Error {
 public:
  using Error::Error;
};

/// No path or speed profile can realize an instruction.
class PlanningError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccr
