#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncsnaf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or length disagreement between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

// NaN/Inf produced or consumed by a numeric routine.
class NumericsError : public Error {
public:
    using Error::Error;
};

// Malformed, truncated or version-mismatched checkpoint.
class FormatError : public Error {
public:
    using Error::Error;
};

// Send or poll times that run backwards on a delayed channel.
class OrderError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Plant state left the finite/bounded region during integration.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

inline void require_dims(bool ok, const std::string& what) {
    if (!ok)
        throw DimensionError(what);
}

} // namespace ncsnaf
