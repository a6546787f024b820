#pragma once

#include <stdexcept>
#include <string>

namespace fisherlab {

/// Base class for numerical failures raised by the library. Precondition
/// violations (bad geometry, negative counts, ...) use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An observed outcome has zero probability everywhere it was evaluated.
class NonFiniteLikelihood : public Error {
 public:
  using Error::Error;
};

/// Fewer than two outcomes carry non-negligible probability.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

/// The log-likelihood is numerically constant over the parameter domain.
class FlatLikelihood : public Error {
 public:
  using Error::Error;
};

/// Sampled phase changes too quickly between neighbouring grid points.
class PhaseUnwrapFailure : public Error {
 public:
  using Error::Error;
};

/// Requested representation exceeds the configured dimension cap.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

/// Posterior mass vanished after an update.
class ZeroPosterior : public Error {
 public:
  using Error::Error;
};

}  // namespace fisherlab
