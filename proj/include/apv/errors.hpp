#pragma once

#include <stdexcept>
#include <string>

namespace apv {

// Base of every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arguments inconsistent with the election model (length mismatch, k out of range).
struct ModelError : Error {
  using Error::Error;
};

// Input outside the domain of a heuristic or statistical test.
struct DomainError : Error {
  using Error::Error;
};

// Enumeration too large to perform exactly, or exact arithmetic overflow.
struct ResourceError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

// Well-formed input that refers to something unknown (e.g. a scenario id).
struct DataError : Error {
  using Error::Error;
};

struct NotFoundError : Error {
  using Error::Error;
};

struct ConflictError : Error {
  using Error::Error;
};

struct ServiceError : Error {
  using Error::Error;
};

}  // namespace apv
