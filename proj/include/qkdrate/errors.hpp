#pragma once

#include <stdexcept>
#include <string>

namespace qkdrate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The thermal-loss channel has eta = 0 and n_th = 0, where the QBER is 0/0.
class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

/// A QBER triple that admits no Bell-diagonal decomposition.
class UnphysicalQberError : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix with a symplectic eigenvalue below the vacuum level.
class NonPhysicalCovarianceError : public Error {
 public:
  using Error::Error;
};

/// Normalization requested for an entanglement-breaking channel.
class NormalizationUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Fock-space cutoff too small for the requested thermal occupation.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A frontier bracket showed the rate is not monotone in the scanned parameter.
class MonotonicityError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown configuration content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qkdrate
