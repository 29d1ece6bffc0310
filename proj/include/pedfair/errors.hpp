#pragma once

#include <stdexcept>

namespace pedfair {

// Base type for every error the library throws on its own behalf.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text is not well-formed (bad JSON syntax, wrong node types). The
// message carries a locus (byte offset or field path) when one is known.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violates a documented invariant (range, uniqueness,
// missing required field). Messages name the offending image/pedestrian id.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A dataset or subgroup that must be non-empty is empty.
class EmptyInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A synthetic-scene spec is malformed or internally inconsistent.
class SpecError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Filesystem-level failure (missing file, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

// Geometry input on which an angle is undefined (zero-length vector).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

// A value outside its documented domain (e.g. orientation not in [0, 360)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A rate requested over an empty support (TP + FN = 0).
class UndefinedRateError : public Error {
 public:
  using Error::Error;
};

// A body-region average requested with a member joint's value missing.
class IncompleteRegionError : public Error {
 public:
  using Error::Error;
};

// Cross-structure bookkeeping mismatch (e.g. a match outcome references a
// ground-truth id that has no attribute record).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace pedfair
