#pragma once

#include <stdexcept>

namespace phddpg {

// Bad scenario/config/route input; the CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss or objective during training; CLI exit code 3.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace phddpg
