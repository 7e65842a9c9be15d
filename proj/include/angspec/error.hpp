#pragma once

#include <stdexcept>
#include <string>

namespace angspec
{

// Precondition or validation failure on user-supplied values.
struct InvalidArgument : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// Numerical failure at run time (aliasing guard, fit divergence, ...).
struct NumericError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct AliasingError : NumericError
{
    using NumericError::NumericError;
};

struct FitError : NumericError
{
    using NumericError::NumericError;
};

} // namespace angspec
