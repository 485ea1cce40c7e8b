#pragma once

#include <stdexcept>
#include <string>

namespace tpmrec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of two machines, or of a machine and an input, disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (e.g. learning on disagreeing outputs).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A key is too short to fill the requested machine.
class InsufficientMaterial : public Error {
 public:
  using Error::Error;
};

/// A numeric argument is outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Privacy amplification cannot produce a key with the requested security parameter.
class InfeasibleBudget : public Error {
 public:
  using Error::Error;
};

/// Estimated error rate exceeds the abort threshold.
class QberAbort : public Error {
 public:
  QberAbort(const std::string& what, double estimate, double threshold)
      : Error(what), estimate_(estimate), threshold_(threshold) {}

  double estimate() const noexcept { return estimate_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double estimate_;
  double threshold_;
};

/// Malformed scenario file or command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tpmrec
