#pragma once

#include <stdexcept>
#include <string>

namespace rinmf {

// Base for everything thrown by this library. The CLI maps the concrete
// types onto process exit codes, so keep the hierarchy flat and stable.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix dimensions do not conform. Message names both shapes.
struct shape_error : error {
    using error::error;
};

// A value is outside its mathematical domain (negative data, zero norm, ...).
struct domain_error : error {
    using error::error;
};

// Inconsistent or out-of-range configuration (exit code 2).
struct config_error : error {
    using error::error;
};

// Malformed input file (exit code 3). Message carries file/line context.
struct data_error : error {
    using error::error;
};

// A solver iterate stopped being usable (exit code 4).
struct divergence_error : error {
    using error::error;
};

} // namespace rinmf
