#pragma once

#include <stdexcept>
#include <string>

namespace treedual {

// Query lies outside the domain of the value function (outside cl K / cl L).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// The set of equivalent martingale measures is empty: the market admits
// arbitrage and none of the duality machinery applies.
class ArbitrageError : public std::runtime_error {
public:
    explicit ArbitrageError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration (polytope vertices, cone rays) exceeded the configured cap.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// Scenario file could not be parsed.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace treedual
