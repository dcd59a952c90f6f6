#pragma once

#include <stdexcept>
#include <string>

namespace hestonlaw {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user input. `field()` names the offending parameter when known.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Mathematically undefined request (transform outside its range, bad order, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation at (or numerically indistinguishable from) a zero of F.
class PoleError : public Error {
public:
    PoleError(const std::string& what, double nearest_root)
        : Error(what), nearest_root_(nearest_root) {}
    double nearest_root() const noexcept { return nearest_root_; }

private:
    double nearest_root_;
};

// Parameter combination the algorithm deliberately does not handle.
class UnsupportedCaseError : public Error {
public:
    using Error::Error;
};

// Incompatible tabulation grids.
class GridError : public Error {
public:
    using Error::Error;
};

// Something the theory guarantees did not happen numerically. Carries a
// diagnostic dump so the failure can be reproduced.
class ConsistencyError : public Error {
public:
    ConsistencyError(const std::string& what, std::string diagnostics = {})
        : Error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

} // namespace hestonlaw
