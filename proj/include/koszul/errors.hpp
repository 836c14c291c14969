#pragma once

#include <stdexcept>
#include <string>

namespace koszul {

// Root of everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model-file diagnostics carry a source position.
struct SyntaxError : Error {
  int line;
  int col;
  std::string expected;
  SyntaxError(int line_, int col_, std::string expected_)
      : Error("syntax error at line " + std::to_string(line_) + ", col " +
              std::to_string(col_) + ": expected " + expected_),
        line(line_), col(col_), expected(std::move(expected_)) {}
};

struct UnknownGenerator : Error {
  using Error::Error;
};
struct BidegreeMismatch : Error {
  using Error::Error;
};
struct UnknownBuiltin : Error {
  using Error::Error;
};
struct KindMismatch : Error {
  using Error::Error;
};
struct AmbientMismatch : Error {
  using Error::Error;
};
struct NotASubspace : Error {
  using Error::Error;
};
struct InvalidPage : Error {
  using Error::Error;
};
struct Unsupported : Error {
  using Error::Error;
};
struct LemmaUnavailable : Error {
  using Error::Error;
};
struct NotClosed : Error {
  using Error::Error;
};
struct PreconditionViolated : Error {
  using Error::Error;
};

// Two routes that must agree by theory disagreed: a bug, never a verdict.
struct InternalInconsistency : Error {
  using Error::Error;
};

}  // namespace koszul
