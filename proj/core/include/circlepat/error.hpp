#pragma once

#include <stdexcept>
#include <string>

namespace circlepat
{

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (angle out of
/// range, non-finite input, totals outside the admissible triangle).
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Malformed input document.
class ParseError : public Error
{
public:
    using Error::Error;
};

/// A well-formed document describes an invalid cell graph or target.
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// An iterative method hit its iteration or step-size limit.
class ConvergenceError : public Error
{
public:
    using Error::Error;
};

/// Problem exceeds the size bound of an exponential-time routine.
class SizeError : public Error
{
public:
    using Error::Error;
};

}  // namespace circlepat
