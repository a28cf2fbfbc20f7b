#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fundata {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A container or argument violates a documented invariant (shapes, keys, grids, ranges).
class ValidationError : public Error {
public:
    using Error::Error;
};

// File could not be read, written, or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

// Local polynomial normal equations are singular at an evaluation point.
class RankDeficientError : public Error {
public:
    RankDeficientError(double t0, double min_eigenvalue, const std::string& detail = {})
        : Error("rank-deficient local fit at t0=" + std::to_string(t0) +
                " (smallest eigenvalue " + std::to_string(min_eigenvalue) + ")" +
                (detail.empty() ? std::string{} : ": " + detail)),
          t0_(t0) {}

    double t0() const noexcept { return t0_; }

private:
    double t0_;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace fundata
