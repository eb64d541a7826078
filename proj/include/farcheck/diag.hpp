#pragma once

#include <stdexcept>
#include <string>

namespace far {

// Frontend diagnostic. line/col are 1-based; 0 means "no position".
struct Diag {
  enum class Kind { SyntaxError, NameError, SortError, DuplicateDecl };
  Kind kind = Kind::SyntaxError;
  int line = 0;
  int col = 0;
  std::string msg;

  std::string str() const;
};

class ParseError : public std::runtime_error {
public:
  explicit ParseError(Diag d) : std::runtime_error(d.str()), diag(std::move(d)) {}
  Diag diag;
};

// Solver branch budget exhausted.
class ResourceLimit : public std::runtime_error {
public:
  explicit ResourceLimit(const std::string& m) : std::runtime_error(m) {}
};

// Pre-image refused: bad cube has more bound variables than the cap.
class ArityLimit : public std::runtime_error {
public:
  explicit ArityLimit(const std::string& m) : std::runtime_error(m) {}
};

// Explicit-state enumeration exceeded its state cap.
class StateLimit : public std::runtime_error {
public:
  explicit StateLimit(const std::string& m) : std::runtime_error(m) {}
};

// Post-verdict invariant audit failed: an engine bug, not a user error.
class AuditFailure : public std::logic_error {
public:
  explicit AuditFailure(const std::string& m) : std::logic_error(m) {}
};

// An extracted counterexample did not replay: an engine bug, not a user error.
class ReplayFailure : public std::logic_error {
public:
  explicit ReplayFailure(const std::string& m) : std::logic_error(m) {}
};

// A trace handed to replay names a transition that is disabled (or malformed)
// at the given step.
class IllFormedTrace : public std::runtime_error {
public:
  IllFormedTrace(int step_, const std::string& m)
      : std::runtime_error(m), step(step_) {}
  int step;
};

}  // namespace far
