#pragma once

#include <stdexcept>
#include <string>

namespace docrep {

// Malformed or incompatible persisted data (bad magic, truncation, dim or
// hash mismatch). The CLI maps this to exit code 2.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite losses/gradients or a solver that cannot proceed. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace docrep
