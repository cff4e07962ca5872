#pragma once

#include <stdexcept>
#include <string>

namespace multiaspect {

// Bad or inconsistent input data (malformed files, invalid ratings, missing
// labels). The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rating required by the φ term of an aspect is absent.
class MissingRating : public DataError {
 public:
  using DataError::DataError;
};

// Summarization needs at least K sentences.
class SummaryTooShort : public DataError {
 public:
  using DataError::DataError;
};

// Non-finite objective or similar optimizer breakdown. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or argument combination. Exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multiaspect
