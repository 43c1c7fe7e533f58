#pragma once

#include <stdexcept>
#include <string>

namespace tdc {

enum class ErrorKind {
    InvalidInput,
    Dimension,
    Singular,
    Configuration,
    WrongCase,        // e.g. rank condition routes the problem to another case
    NoFreedom,        // no left null space / nothing to stabilize with
    Inconsistent,     // assembled observer violates the decoupling conditions
    Unsupported,      // rank-deficient two-delay measurement
    Ordering,         // delays not strictly increasing
    Extraction,       // gain recovery from an LMI solution failed
    NoFeasibleStart,  // delay sweep infeasible at its lower end
    Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double condition)
        : Error(ErrorKind::Singular, what), condition_(condition) {}
    [[nodiscard]] double condition() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace tdc
