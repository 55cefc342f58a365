#pragma once

#include <stdexcept>
#include <string>

namespace hts {

enum class ErrorKind { precondition, structural, budget, parse, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(ErrorKind::precondition, w) {}
};
struct StructuralError : Error {
  explicit StructuralError(const std::string& w) : Error(ErrorKind::structural, w) {}
};
struct BudgetError : Error {
  explicit BudgetError(const std::string& w) : Error(ErrorKind::budget, w) {}
};
struct ParseError : Error {
  ParseError(const std::string& w, int line = 0)
      : Error(ErrorKind::parse, line > 0 ? "line " + std::to_string(line) + ": " + w : w), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

// CLI exit code for an error kind
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::io: return 3;
    default: return 2;
  }
}

}  // namespace hts
