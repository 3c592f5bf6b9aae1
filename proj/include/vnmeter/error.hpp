#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vnmeter {

enum class ErrorKind {
    InvalidArgument,
    GridTooCoarse,
    GridTooNarrow,
    DegenerateKernel,
    ZeroCoupling,
    DomainError,
    AsymmetricCoupling,
    Caustic,
    BoundaryLeak,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Probability reached the outer band of a grid axis during an evolution.
class BoundaryLeakError : public Error {
public:
    BoundaryLeakError(std::size_t step, double time, char axis, double mass, double tolerance);

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }
    char axis() const noexcept { return axis_; }
    double mass() const noexcept { return mass_; }

private:
    std::size_t step_;
    double time_;
    char axis_;
    double mass_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace vnmeter
