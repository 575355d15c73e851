#pragma once

#include <stdexcept>
#include <string>

namespace pbr {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error
{
public:
    using Error::Error;
};

class NonConvergence : public Error
{
public:
    using Error::Error;
};

/// Root bracket whose end points do not straddle a sign change.
class InvalidBracket : public Error
{
public:
    using Error::Error;
};

/// Adaptive ODE step fell below the representable resolution of t.
class StepUnderflow : public Error
{
public:
    using Error::Error;
};

/// R >= mu_max: no light level compensates respiration.
class InfeasibleRespiration : public Error
{
public:
    using Error::Error;
};

/// Bracket auto-expansion could not enclose the maximizer before the cap.
class BracketMiss : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

class DegenerateRange : public Error
{
public:
    using Error::Error;
};

/// Malformed or unknown entry in a parameter file.
class ParamFileError : public Error
{
public:
    using Error::Error;
};

} // namespace pbr
