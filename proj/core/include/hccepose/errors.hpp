#pragma once

#include <stdexcept>
#include <string>

namespace hcce {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Mismatched container sizes or malformed parameter combinations.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Geometric configuration too degenerate to process (collinear points,
/// empty point sets, rank-deficient systems).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A 3D point mapped to non-positive depth during projection.
class BehindCameraError : public Error {
public:
    using Error::Error;
};

/// Text or binary input could not be parsed; the message carries
/// file and line context where available.
class ParseError : public Error {
public:
    using Error::Error;
};

/// File-level failures: missing files, short reads, version mismatches.
class IoError : public Error {
public:
    using Error::Error;
};

/// Pose sampling never produced a visible object.
class UnrenderableError : public Error {
public:
    using Error::Error;
};

/// Too few distinct pixel groups to draw a minimal sample.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Every robust-estimation iteration was degenerate or rejected.
class NoPoseError : public Error {
public:
    using Error::Error;
};

}  // namespace hcce
