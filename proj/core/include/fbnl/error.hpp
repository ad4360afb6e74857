#pragma once

#include <stdexcept>
#include <string>

namespace fbnl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters, configuration, or geometry requests.
class ParameterError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Iterative method, quadrature, or root search failed to reach its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace fbnl
