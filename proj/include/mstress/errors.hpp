#pragma once

#include <stdexcept>
#include <string>

namespace mstress {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files (JSONL, config, checkpoints).
struct ParseError : Error {
  using Error::Error;
};

// Well-formed input that violates a documented invariant or precondition.
struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace mstress
