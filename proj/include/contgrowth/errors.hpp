#pragma once

#include <stdexcept>
#include <string>

namespace contgrowth {

// Malformed arguments: non-finite coordinates, nonpositive radii, bad laws.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A query that needs a non-empty region was given an empty one.
class EmptyRegion : public std::logic_error {
public:
    EmptyRegion() : std::logic_error("operation requires a non-empty region") {}
};

// The chain-of-balls bound needs P(R >= gamma) > 0.
class BoundInapplicable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace contgrowth

namespace contgrowth {

// Too many replications hit the event cap; carries the diagnostic.
class EstimationAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace contgrowth
