#pragma once

#include <stdexcept>
#include <string>

namespace imbench {

// CSV cell that is non-empty but not numeric, malformed config files, etc.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Dataset violates a structural invariant (single class, empty, NaN feature).
class InvalidDatasetError : public std::runtime_error {
public:
    explicit InvalidDatasetError(const std::string& what) : std::runtime_error(what) {}
};

// A class is too small to place at least one sample on each side of a split.
class InvalidSplitError : public std::runtime_error {
public:
    explicit InvalidSplitError(const std::string& what) : std::runtime_error(what) {}
};

// A resampling method cannot run on this input (no borderline samples,
// no minority-dominated cluster, zero adaptive weight mass, ...).
class ResampleError : public std::runtime_error {
public:
    explicit ResampleError(const std::string& what) : std::runtime_error(what) {}
};

// Curve metric requested on degenerate input (single-class, no positives).
class UndefinedMetricError : public std::runtime_error {
public:
    explicit UndefinedMetricError(const std::string& what) : std::runtime_error(what) {}
};

// Unknown method id or a parameter assignment outside the method's schema.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace imbench
