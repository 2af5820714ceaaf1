#pragma once

#include <stdexcept>
#include <string>

namespace mapcma
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// A Cholesky pivot was non-positive.
    class NotPositiveDefinite : public Error
    {
    public:
        using Error::Error;
    };

    class DimensionMismatch : public Error
    {
    public:
        using Error::Error;
    };

    /// The covariance lost positive definiteness during an update.
    class CovarianceCollapse : public Error
    {
    public:
        using Error::Error;
    };

    class InvalidConfig : public Error
    {
    public:
        using Error::Error;
    };

    /// Prior parameters that do not describe a proper normal-inverse-Wishart density.
    class InvalidPrior : public Error
    {
    public:
        using Error::Error;
    };
}
