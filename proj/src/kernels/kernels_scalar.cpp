#include "mapcma/kernels.hpp"

namespace mapcma::kernels::scalar
{
    namespace
    {
        double dot(const double* a, const double* b, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += a[i] * b[i];
            return s;
        }

        double sum_squares(const double* x, std::size_t n)
        {
            return dot(x, x, n);
        }

        double weighted_sum_squares(const double* w, const double* x, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += w[i] * x[i] * x[i];
            return s;
        }

        void axpy(double alpha, const double* x, double* y, std::size_t n)
        {
            for (std::size_t i = 0; i < n; ++i)
                y[i] += alpha * x[i];
        }

        void rank1_update(double alpha, const double* v, double* a, std::size_t n)
        {
            for (std::size_t j = 0; j < n; ++j)
                axpy(alpha * v[j], v, a + j * n, n);
        }

        double rosenbrock(const double* x, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
            {
                const double a = x[i] * x[i] - x[i + 1];
                const double b = x[i] - 1.0;
                s += 100.0 * a * a + b * b;
            }
            return s;
        }
    }

    const KernelTable& table()
    {
        static const KernelTable t{
            dot, sum_squares, weighted_sum_squares, axpy, rank1_update, rosenbrock,
        };
        return t;
    }
}
