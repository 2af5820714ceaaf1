#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mapcma
{
    enum class Function
    {
        Sphere,
        Ellipsoid,
        Cigar,
        Rosenbrock,
        Ackley,
        Rastrigin,
    };

    /// Canonical lower-case name ("sphere", "ellipsoid", ...).
    std::string_view function_name(Function f);
    std::optional<Function> parse_function(std::string_view name);

    /// Box [lower, upper]^N the initial mean is drawn from; sigma0 = (upper - lower) / 2.
    struct InitBox
    {
        double lower;
        double upper;
    };

    InitBox default_init_box(Function f);

    class Objective
    {
    public:
        /// Throws InvalidConfig for dim < 2.
        Objective(Function fn, std::size_t dim);

        [[nodiscard]] Function function() const { return fn_; }
        [[nodiscard]] std::size_t dim() const { return dim_; }
        [[nodiscard]] std::string_view name() const { return function_name(fn_); }
        [[nodiscard]] InitBox init_box() const { return default_init_box(fn_); }

        /// Throws DimensionMismatch when x.size() != dim().
        [[nodiscard]] double evaluate(std::span<const double> x) const;
        [[nodiscard]] double operator()(std::span<const double> x) const { return evaluate(x); }

    private:
        Function fn_;
        std::size_t dim_;
        std::vector<double> ellipsoid_scale_;
    };

    /// Counts objective evaluations against a fixed budget.
    class EvalBudgetCounter
    {
    public:
        explicit EvalBudgetCounter(std::uint64_t max);

        /// Records n evaluations. Returns false (and records nothing) when
        /// that would exceed the budget.
        bool charge(std::uint64_t n);

        [[nodiscard]] std::uint64_t count() const { return count_; }
        [[nodiscard]] std::uint64_t max() const { return max_; }
        [[nodiscard]] std::uint64_t remaining() const { return max_ - count_; }
        [[nodiscard]] bool exhausted() const { return count_ >= max_; }

    private:
        std::uint64_t count_ = 0;
        std::uint64_t max_;
    };
}
