#pragma once

#include <stdexcept>
#include <string>

namespace radloc {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compensation (or distortion) drove a range below zero.
class NegativeRange : public Error {
 public:
  using Error::Error;
};

class EmptySubmap : public Error {
 public:
  using Error::Error;
};

class NoMatches : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class InsufficientInliers : public Error {
 public:
  using Error::Error;
};

class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class EmptyGrid : public Error {
 public:
  using Error::Error;
};

class AllOutliers : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure; the message carries the underlying reason verbatim.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace radloc
