#pragma once

#include <stdexcept>
#include <string>

namespace beamcover {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter value. The message names the
/// offending field (e.g. "n_users").
class config_error : public error {
public:
    using error::error;
};

/// File or stream problem (missing file, malformed line, unwritable dir).
class io_error : public error {
public:
    using error::error;
};

/// Instance is larger than the exact solver's vertex cap.
class size_cap_error : public error {
public:
    using error::error;
};

/// Exact solver ran out of its search-node budget before proving optimality.
class budget_error : public error {
public:
    using error::error;
};

}  // namespace beamcover
