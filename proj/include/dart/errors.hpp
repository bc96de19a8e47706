#pragma once

#include <stdexcept>

namespace dart {

/// Base class for every error thrown by the library.
struct DartError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define DART_DEFINE_ERROR(Name) \
  struct Name : DartError {     \
    using DartError::DartError; \
  }

// Parsing / input
DART_DEFINE_ERROR(TruncatedRecord);
DART_DEFINE_ERROR(OutOfBounds);
DART_DEFINE_ERROR(ParseError);
DART_DEFINE_ERROR(InvalidTimestamp);
DART_DEFINE_ERROR(OrderViolation);
DART_DEFINE_ERROR(OverlapError);
DART_DEFINE_ERROR(InvalidBox);
DART_DEFINE_ERROR(IoError);

// Configuration / domain
DART_DEFINE_ERROR(ConfigError);
DART_DEFINE_ERROR(OutOfRange);
DART_DEFINE_ERROR(CenterEvent);
DART_DEFINE_ERROR(ShapeError);
DART_DEFINE_ERROR(DomainError);

// Training / inference
DART_DEFINE_ERROR(DegenerateTraining);
DART_DEFINE_ERROR(NoEvidence);
DART_DEFINE_ERROR(InsufficientInit);
DART_DEFINE_ERROR(NoComponent);
DART_DEFINE_ERROR(NoGroundTruth);
DART_DEFINE_ERROR(NoSuccesses);
DART_DEFINE_ERROR(InsufficientCandidates);

#undef DART_DEFINE_ERROR

}  // namespace dart
