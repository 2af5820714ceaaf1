// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "mapcma/kernels.hpp"

#include <immintrin.h>

namespace mapcma::kernels::avx2
{
    namespace
    {
        inline double hsum(__m256d v)
        {
            const __m128d lo = _mm256_castpd256_pd128(v);
            const __m128d hi = _mm256_extractf128_pd(v, 1);
            const __m128d s = _mm_add_pd(lo, hi);
            return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
        }

        double dot(const double* a, const double* b, std::size_t n)
        {
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 8 <= n; i += 8)
            {
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
                acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
            }
            for (; i + 4 <= n; i += 4)
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
            double s = hsum(_mm256_add_pd(acc0, acc1));
            for (; i < n; ++i)
                s += a[i] * b[i];
            return s;
        }

        double sum_squares(const double* x, std::size_t n)
        {
            return dot(x, x, n);
        }

        double weighted_sum_squares(const double* w, const double* x, std::size_t n)
        {
            __m256d acc = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
            {
                const __m256d xv = _mm256_loadu_pd(x + i);
                acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), xv), xv, acc);
            }
            double s = hsum(acc);
            for (; i < n; ++i)
                s += w[i] * x[i] * x[i];
            return s;
        }

        void axpy(double alpha, const double* x, double* y, std::size_t n)
        {
            const __m256d av = _mm256_set1_pd(alpha);
            std::size_t i = 0;
            for (; i + 4 <= n; i += 4)
                _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
            for (; i < n; ++i)
                y[i] += alpha * x[i];
        }

        void rank1_update(double alpha, const double* v, double* a, std::size_t n)
        {
            for (std::size_t j = 0; j < n; ++j)
                axpy(alpha * v[j], v, a + j * n, n);
        }

        double rosenbrock(const double* x, std::size_t n)
        {
            if (n < 2)
                return 0.0;
            const std::size_t terms = n - 1;
            const __m256d hundred = _mm256_set1_pd(100.0);
            const __m256d one = _mm256_set1_pd(1.0);
            __m256d acc = _mm256_setzero_pd();
            std::size_t i = 0;
            for (; i + 4 <= terms; i += 4)
            {
                const __m256d xi = _mm256_loadu_pd(x + i);
                const __m256d xn = _mm256_loadu_pd(x + i + 1);
                const __m256d a = _mm256_fmsub_pd(xi, xi, xn);
                const __m256d b = _mm256_sub_pd(xi, one);
                acc = _mm256_fmadd_pd(_mm256_mul_pd(hundred, a), a, acc);
                acc = _mm256_fmadd_pd(b, b, acc);
            }
            double s = hsum(acc);
            for (; i < terms; ++i)
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
