#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace esos {

// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class non_convergence : public error {
public:
    using error::error;
};

class invalid_context : public error {
public:
    using error::error;
};

// A bracket that the computation divides by is too close to a zero of f.
// guard() names the offending bracket, e.g. "[theta+zeta+lambda_1]".
class degenerate_parameter : public error {
public:
    explicit degenerate_parameter(std::string guard)
        : error("degenerate parameter: " + guard + " below guard threshold"), guard_(std::move(guard))
    {
    }
    const std::string &guard() const noexcept { return guard_; }

private:
    std::string guard_;
};

class degenerate_nodes : public error {
public:
    using error::error;
};

class contour_too_large : public error {
public:
    using error::error;
};

} // namespace esos
