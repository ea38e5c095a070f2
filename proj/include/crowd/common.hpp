#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace crowd {

// Thrown for invalid configuration or malformed inputs (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a required numerical computation fails to converge or a
// root/bracket cannot be found (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by allocation policies when no eligible task exists; the caller
// is expected to skip the current worker.
class AllocationError : public std::runtime_error {
public:
    explicit AllocationError(const std::string& what) : std::runtime_error(what) {}
};

// exp(u)/(1+exp(u)) without overflow for any u.
inline double sigmoid(double u) {
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

// log(1+exp(u)) without overflow for any u.
inline double softplus(double u) {
    if (u > 0.0) {
        return u + std::log1p(std::exp(-u));
    }
    return std::log1p(std::exp(u));
}

// log(p/(1-p)); computed as a difference of logs so that values of p very
// close to 0.5 keep full relative precision.
inline double logit(double p) {
    return std::log(p) - std::log1p(-p);
}

}  // namespace crowd
