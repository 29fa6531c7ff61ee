#pragma once

#include <stdexcept>
#include <string>

namespace msched {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Query at attained service past the end of a finite support.
struct QueryBeyondSupport : Error {
  using Error::Error;
};

/// Conditional probability requested given a zero-probability event.
struct ConditioningOnNull : Error {
  using Error::Error;
};

/// Closed forms asked for a non-monotone hazard stage.
struct UnsupportedClass : Error {
  using Error::Error;
};

/// Operation undefined for this case (e.g. phi with an IHR second stage).
struct NotApplicable : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

/// Bisection endpoints did not have the expected optimal actions.
struct BracketFailure : Error {
  using Error::Error;
};

/// A profit envelope that never becomes positive has no index.
struct NeverPositive : Error {
  using Error::Error;
};

struct UnknownFixture : Error {
  using Error::Error;
};

struct InvalidDistribution : Error {
  using Error::Error;
};

/// Malformed job-spec or scenario file.
struct SpecParseError : Error {
  using Error::Error;
};

}  // namespace msched
