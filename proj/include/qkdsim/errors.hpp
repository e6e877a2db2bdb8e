#pragma once

#include <stdexcept>

namespace qkdsim {

/// Thrown when a statistic is requested from an empty sample, e.g. a test
/// correlator cell that received no rounds. Callers must treat this as a
/// failed run; silently passing on missing data is not an option here.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qkdsim
