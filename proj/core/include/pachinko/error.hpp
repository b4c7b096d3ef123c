#pragma once

#include <stdexcept>
#include <string>

namespace pachinko {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (CSV/JSON syntax, bad dates, ...). Messages carry the
// file and line where applicable.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input that violates a documented invariant
// (duplicate keys, out-of-range coordinates, degenerate parameters, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; `stage()` names the stage for diagnostics.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace pachinko
