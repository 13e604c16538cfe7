#ifndef SLAMKIT_ERRORS_HPP
#define SLAMKIT_ERRORS_HPP

#include <stdexcept>

namespace slamkit {

/// Bad configuration: unknown names, missing files, invalid parameters.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data files.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace slamkit

#endif  // SLAMKIT_ERRORS_HPP
