#pragma once

#include <stdexcept>
#include <string>

namespace pqc {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("invalid configuration: " + msg) {}
};

// Iterative solver failed to reach the requested tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, double residual)
        : Error("solver error: " + msg + " (last residual " + std::to_string(residual) + ")"),
          last_residual(residual) {}
    double last_residual;
};

class InfeasibleKError : public Error {
public:
    explicit InfeasibleKError(const std::string& msg) : Error("infeasible k: " + msg) {}
};

class ComponentCollapseError : public Error {
public:
    explicit ComponentCollapseError(const std::string& msg) : Error("component collapse: " + msg) {}
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& msg) : Error("budget exceeded: " + msg) {}
};

class CodecError : public Error {
public:
    explicit CodecError(const std::string& msg) : Error("codec error: " + msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("I/O error: " + msg) {}
};

} // namespace pqc
