#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

/// Base class of every typed error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};
struct GridMismatch : Error {
  using Error::Error;
};
struct ZeroField : Error {
  using Error::Error;
};
struct ZeroMass : Error {
  using Error::Error;
};
struct AsymmetricPotential : Error {
  using Error::Error;
};
struct NonDifferentiablePotential : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NoSignChange : Error {
  using Error::Error;
};
struct NanEncountered : Error {
  using Error::Error;
};
struct BracketNotFound : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct GeometryViolated : Error {
  using Error::Error;
};
struct NoAdmissibleR : Error {
  using Error::Error;
};
struct InfiniteWNorm : Error {
  using Error::Error;
};
struct ChecksumMismatch : Error {
  using Error::Error;
};
struct InsufficientTail : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace choquard
