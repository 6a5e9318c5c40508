#pragma once

#include <stdexcept>
#include <string>

namespace resk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ConstraintViolated : Error {
    using Error::Error;
};

struct DivergentTail : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct TooFewPoints : Error {
    using Error::Error;
};

struct DegenerateCluster : Error {
    using Error::Error;
};

struct ClusterCollapse : Error {
    using Error::Error;
};

struct EmptyCluster : Error {
    using Error::Error;
};

struct TooManyClasses : Error {
    using Error::Error;
};

struct UnknownPreset : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct MissingColumn : Error {
    using Error::Error;
};

struct FileNotFound : Error {
    using Error::Error;
};

} // namespace resk
