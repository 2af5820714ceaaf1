#include "mapcma/objectives.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "mapcma/errors.hpp"
#include "mapcma/kernels.hpp"

namespace mapcma
{
    namespace
    {
        constexpr std::array<std::pair<Function, std::string_view>, 6> names{{
            {Function::Sphere, "sphere"},
            {Function::Ellipsoid, "ellipsoid"},
            {Function::Cigar, "cigar"},
            {Function::Rosenbrock, "rosenbrock"},
            {Function::Ackley, "ackley"},
            {Function::Rastrigin, "rastrigin"},
        }};

        double sum_cos_2pi(std::span<const double> x)
        {
            double s = 0.0;
            for (const double xi : x)
                s += std::cos(2.0 * std::numbers::pi * xi);
            return s;
        }
    }

    std::string_view function_name(Function f)
    {
        for (const auto& [fn, name] : names)
            if (fn == f)
                return name;
        return "unknown";
    }

    std::optional<Function> parse_function(std::string_view name)
    {
        for (const auto& [fn, n] : names)
            if (n == name)
                return fn;
        return std::nullopt;
    }

    InitBox default_init_box(Function f)
    {
        switch (f)
        {
        case Function::Rosenbrock:
            return {-2.0, 2.0};
        case Function::Ackley:
            return {1.0, 30.0};
        default:
            return {1.0, 5.0};
        }
    }

    Objective::Objective(Function fn, std::size_t dim) : fn_(fn), dim_(dim)
    {
        if (dim < 2)
            throw InvalidConfig("objective dimension must be >= 2, got " + std::to_string(dim));
        if (fn == Function::Ellipsoid)
        {
            ellipsoid_scale_.resize(dim);
            for (std::size_t i = 0; i < dim; ++i)
                ellipsoid_scale_[i] = std::pow(10.0, 6.0 * static_cast<double>(i) / static_cast<double>(dim - 1));
        }
    }

    double Objective::evaluate(std::span<const double> x) const
    {
        if (x.size() != dim_)
            throw DimensionMismatch("objective " + std::string(name()) + " expects dim " + std::to_string(dim_) +
                                    ", got " + std::to_string(x.size()));
        const auto n = static_cast<double>(dim_);
        switch (fn_)
        {
        case Function::Sphere:
            return kernels::sum_squares(x);
        case Function::Ellipsoid:
            return kernels::weighted_sum_squares(ellipsoid_scale_, x);
        case Function::Cigar:
            return x[0] * x[0] + 1e6 * kernels::sum_squares(x.subspan(1));
        case Function::Rosenbrock:
            return kernels::rosenbrock(x);
        case Function::Ackley:
        {
            const double e = std::exp(1.0);
            const double rms = std::sqrt(kernels::sum_squares(x) / n);
            return 20.0 - 20.0 * std::exp(-0.2 * rms) + e - std::exp(sum_cos_2pi(x) / n);
        }
        case Function::Rastrigin:
            return 10.0 * n + kernels::sum_squares(x) - 10.0 * sum_cos_2pi(x);
        }
        return 0.0;
    }

    EvalBudgetCounter::EvalBudgetCounter(std::uint64_t max) : max_(max)
    {
        if (max == 0)
            throw InvalidConfig("evaluation budget must be positive");
    }

    bool EvalBudgetCounter::charge(std::uint64_t n)
    {
        if (n > remaining())
            return false;
        count_ += n;
        return true;
    }
}
