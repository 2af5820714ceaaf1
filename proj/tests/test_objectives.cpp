#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mapcma/errors.hpp"
#include "mapcma/objectives.hpp"
#include "test_support.hpp"

using namespace mapcma;

namespace
{
    const std::vector<Function> all_functions{Function::Sphere,     Function::Ellipsoid, Function::Cigar,
                                              Function::Rosenbrock, Function::Ackley,    Function::Rastrigin};
}

TEST_CASE("objective values at known points")
{
    CHECK(Objective(Function::Sphere, 4)(std::vector<double>(4, 0.0)) == 0.0);
    CHECK(Objective(Function::Rosenbrock, 6)(std::vector<double>(6, 1.0)) == 0.0);
    CHECK(Objective(Function::Rastrigin, 5)(std::vector<double>(5, 0.0)) == 0.0);
    CHECK(std::abs(Objective(Function::Ackley, 5)(std::vector<double>(5, 0.0))) <= 4e-16);
    CHECK(Objective(Function::Ellipsoid, 2)(std::vector<double>{1.0, 1.0}) == 1.0 + 1e6);
    CHECK(Objective(Function::Cigar, 3)(std::vector<double>{1.0, 1.0, 1.0}) == 1.0 + 2e6);
}

TEST_CASE("objective formulas on a generic point")
{
    // Direct evaluation of each definition with plain loops.
    const std::vector<double> x{0.3, -1.2, 2.5, 0.7};
    const double n = 4.0;
    const double pi = std::acos(-1.0);
    double sphere = 0, ellipsoid = 0, cigar = x[0] * x[0], rosen = 0, cos_sum = 0;
    for (std::size_t i = 0; i < 4; ++i)
    {
        sphere += x[i] * x[i];
        ellipsoid += std::pow(10.0, 6.0 * static_cast<double>(i) / 3.0) * x[i] * x[i];
        if (i > 0)
            cigar += 1e6 * x[i] * x[i];
        if (i < 3)
            rosen += 100.0 * std::pow(x[i] * x[i] - x[i + 1], 2) + std::pow(x[i] - 1.0, 2);
        cos_sum += std::cos(2.0 * pi * x[i]);
    }
    const double ackley = 20.0 - 20.0 * std::exp(-0.2 * std::sqrt(sphere / n)) + std::exp(1.0) - std::exp(cos_sum / n);
    const double rastrigin = 10.0 * n + sphere - 10.0 * cos_sum;

    CHECK(Objective(Function::Sphere, 4)(x) == doctest::Approx(sphere).epsilon(1e-14));
    CHECK(Objective(Function::Ellipsoid, 4)(x) == doctest::Approx(ellipsoid).epsilon(1e-14));
    CHECK(Objective(Function::Cigar, 4)(x) == doctest::Approx(cigar).epsilon(1e-14));
    CHECK(Objective(Function::Rosenbrock, 4)(x) == doctest::Approx(rosen).epsilon(1e-14));
    CHECK(Objective(Function::Ackley, 4)(x) == doctest::Approx(ackley).epsilon(1e-14));
    CHECK(Objective(Function::Rastrigin, 4)(x) == doctest::Approx(rastrigin).epsilon(1e-14));
}

TEST_CASE("objective optimum and non-negativity")
{
    testing::Gen gen(17);
    for (const Function f : all_functions)
        for (const std::size_t n : {2u, 3u, 10u, 33u})
        {
            CAPTURE(function_name(f));
            CAPTURE(n);
            const Objective obj(f, n);
            const std::vector<double> opt(n, f == Function::Rosenbrock ? 1.0 : 0.0);
            CHECK(std::abs(obj(opt)) <= (f == Function::Ackley ? 1e-9 : 1e-12));
            for (int trial = 0; trial < 200; ++trial)
            {
                std::vector<double> x(n);
                const double scale = std::exp(gen.uniform(-10.0, 4.0));
                for (auto& xi : x)
                    xi = scale * gen.normal();
                CHECK(obj(x) >= -1e-12);
            }
        }
}

TEST_CASE("permutation symmetry of sphere, ackley and rastrigin")
{
    testing::Gen gen(23);
    for (const Function f : {Function::Sphere, Function::Ackley, Function::Rastrigin})
    {
        CAPTURE(function_name(f));
        const Objective obj(f, 12);
        for (int trial = 0; trial < 100; ++trial)
        {
            std::vector<double> x(12);
            for (auto& xi : x)
                xi = gen.uniform(-5.0, 5.0);
            std::vector<double> p = x;
            std::shuffle(p.begin(), p.end(), gen.engine());
            // Reordering a floating-point sum changes rounding, so generic
            // inputs agree to rounding only.
            CHECK(obj(p) == doctest::Approx(obj(x)).epsilon(1e-14));

            // Integer inputs make every term and partial sum exact.
            std::vector<double> xi(12);
            for (auto& v : xi)
                v = std::round(gen.uniform(-20.0, 20.0));
            std::vector<double> pi = xi;
            std::shuffle(pi.begin(), pi.end(), gen.engine());
            CHECK(obj(pi) == obj(xi));
        }
    }
}

TEST_CASE("objective metadata and errors")
{
    CHECK(default_init_box(Function::Sphere).lower == 1.0);
    CHECK(default_init_box(Function::Ellipsoid).upper == 5.0);
    CHECK(default_init_box(Function::Cigar).upper == 5.0);
    CHECK(default_init_box(Function::Rastrigin).lower == 1.0);
    CHECK(default_init_box(Function::Rosenbrock).lower == -2.0);
    CHECK(default_init_box(Function::Rosenbrock).upper == 2.0);
    CHECK(default_init_box(Function::Ackley).lower == 1.0);
    CHECK(default_init_box(Function::Ackley).upper == 30.0);

    for (const Function f : all_functions)
        CHECK(parse_function(function_name(f)) == f);
    CHECK_FALSE(parse_function("Sphere").has_value());
    CHECK_FALSE(parse_function("bbob").has_value());

    CHECK_THROWS_AS(Objective(Function::Sphere, 1), InvalidConfig);
    const Objective sphere3(Function::Sphere, 3);
    CHECK_THROWS_AS(static_cast<void>(sphere3(std::vector<double>(2, 0.0))), DimensionMismatch);
}

TEST_CASE("evaluation budget counter")
{
    EvalBudgetCounter c(10);
    CHECK(c.charge(4));
    CHECK(c.charge(6));
    CHECK(c.exhausted());
    CHECK_FALSE(c.charge(1));
    CHECK(c.count() == 10);
    CHECK(c.count() <= c.max());
    CHECK_THROWS_AS(EvalBudgetCounter(0), InvalidConfig);
}
