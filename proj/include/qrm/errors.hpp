#pragma once

#include <stdexcept>
#include <string>

namespace qrm {

// Argument outside the domain where a formula is defined (t on a cut,
// x at a pole, tau below the convergence abscissa, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A series or quadrature did not reach its tolerance within the budget.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qrm
