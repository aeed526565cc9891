#ifndef DIELENS_ERRORS_HPP
#define DIELENS_ERRORS_HPP

#include <stdexcept>

namespace dielens {

// Bad caller input: out-of-range arguments, malformed specs. The CLI maps
// these (and validation_error) to exit code 2.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input data that parsed but fails validation: calibration tables, config
// files. Messages carry row/line numbers where available.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-level failures. The CLI maps these to exit code 1.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dielens

#endif
