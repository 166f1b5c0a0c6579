#pragma once

#include <stdexcept>
#include <string>

namespace dgoursat {

/// Bad input: inconsistent shapes, parameters outside their domain, malformed files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation left the finite range or violated a checked identity.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dgoursat
