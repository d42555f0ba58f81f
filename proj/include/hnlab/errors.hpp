#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hnlab {

/// Raised when an equation has no solution for topological reasons
/// (Chern-Weil / integrated identities). The CLI maps it to exit code 2.
class ObstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by iterative solvers that fail to reach their tolerance.
/// Carries the residual history so callers can report it.
class NonconvergenceError : public std::runtime_error {
public:
    NonconvergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

} // namespace hnlab
