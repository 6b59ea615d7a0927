#pragma once

#include <stdexcept>
#include <string>

namespace odo {

// Base for every recoverable error the engine raises. Anything not derived
// from this escaping the library is a bug.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- math / state ---------------------------------------------------------

// Quaternion norm too small to renormalize.
struct DegenerateQuaternion : Error {
  using Error::Error;
};

// Initial accelerometer average too short to define "down".
struct DegenerateGravity : Error {
  using Error::Error;
};

// Device screen normal is too close to vertical to define a wall heading.
struct DegenerateNormal : Error {
  using Error::Error;
};

// Vector/matrix size does not match the state layout.
struct DimensionMismatch : Error {
  using Error::Error;
};

// Referenced augmented block id does not exist.
struct UnknownBlock : Error {
  using Error::Error;
};

// --- filtering ------------------------------------------------------------

struct NonPositiveDt : Error {
  using Error::Error;
};

// IMU gap longer than the configured maximum; the filter refuses to coast.
struct GapTooLarge : Error {
  using Error::Error;
};

struct CovarianceNotPSD : Error {
  using Error::Error;
};

// Innovation covariance numerically singular in a measurement update.
struct SingularInnovation : Error {
  using Error::Error;
};

// Predicted covariance not invertible in the smoother gain.
struct SingularPredictedCovariance : Error {
  using Error::Error;
};

// Relative baro update requested before any reference pressure was seen.
struct MissingReference : Error {
  using Error::Error;
};

// --- io / configuration ----------------------------------------------------

struct ParseError : Error {
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

// Timestamps regress by more than the reorder tolerance.
struct NonMonotoneTime : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct InvalidScenario : Error {
  using Error::Error;
};

// Estimate and truth trajectories do not overlap in time.
struct TimeRangeMismatch : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace odo
