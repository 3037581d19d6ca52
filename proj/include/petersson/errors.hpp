#pragma once

#include <stdexcept>

namespace petersson {

struct budget_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_query : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct coprimality_violation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct insufficient_coefficients : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct undecidable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace petersson
