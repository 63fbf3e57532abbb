#ifndef MSLIFT_ERRORS_HPP
#define MSLIFT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mslift {

/// Malformed argument to a primitive operation (empty urn, non-positive variance, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scenario, action or lifted state violates a structural invariant.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested operation is outside the supported representation space
/// (e.g. grounding a Gaussian context, equality tests on Gaussian properties).
class UnsupportedOperation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A split or enumeration budget was exhausted.
class ResourceLimit : public std::runtime_error {
public:
    ResourceLimit(const std::string& what, std::size_t frontier)
        : std::runtime_error(what + " (frontier size " + std::to_string(frontier) + ")"),
          frontier_(frontier) {}

    std::size_t frontier() const noexcept { return frontier_; }

private:
    std::size_t frontier_;
};

/// Base of the errors raised when an observation has zero total likelihood.
/// The lifted and ground variants carry the pre-update distribution.
class ImpossibleObservationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mslift

#endif
