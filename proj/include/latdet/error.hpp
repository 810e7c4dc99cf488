#pragma once

#include <stdexcept>
#include <string>

namespace latdet {

/* Matrix/vector shapes disagree with the declared system size. */
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/* An exact enumeration would exceed the configured point budget. */
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Channel matrix is numerically rank deficient; caller should redraw. */
struct SingularChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Bad experiment configuration (file contents or flag values). */
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Filesystem-level failure (missing file, unwritable directory, ...). */
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace latdet
