#pragma once

#include <stdexcept>
#include <string>

namespace greedymax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters, malformed bounds, wrong dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An objective or oracle produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A theoretical-parameter formula became nonpositive or non-finite.
class TuningError : public Error {
 public:
  TuningError(int item, const std::string& what)
      : Error("tuning item " + std::to_string(item) + ": " + what), item_(item) {}

  int item() const noexcept { return item_; }

 private:
  int item_;
};

}  // namespace greedymax
