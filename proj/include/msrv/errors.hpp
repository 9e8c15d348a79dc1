#pragma once

#include <stdexcept>

namespace msrv {

/// Input data (series, file contents, scale choices) violates an operation's
/// requirements. The CLI maps this to exit code 2.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A configuration file or option set is invalid. CLI exit code 4.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite values encountered inside a numeric routine.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace msrv
