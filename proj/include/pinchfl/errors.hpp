#pragma once

#include <stdexcept>
#include <string>

namespace pinchfl {

// Precondition breach on a numeric or count argument.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested closed form is not defined for this position law.
class UnsupportedDistributionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Spectral efficiency is zero (or negative), so no upload can finish.
class InfeasibleLinkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A high-SNR expansion was evaluated below its validity threshold.
class OutOfRegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid run configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

namespace detail {

template <class Error = ParameterError>
inline void require(bool ok, const char* what) {
    if (!ok) throw Error(what);
}

}  // namespace detail
}  // namespace pinchfl
