#pragma once

// Data-parallel inner loops used by the objectives and the distribution
// updates. Each kernel has a portable scalar reference implementation and,
// where the target supports it, an AVX2+FMA variant. The variant is picked
// once at startup from CPUID; MAPCMA_ISA=scalar forces the reference path.
//
// Variants agree to rounding (summation order differs), not bit for bit.
// Within one process the choice is fixed, so results stay deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace mapcma::kernels
{
    enum class Isa
    {
        Scalar,
        Avx2,
    };

    std::string_view isa_name(Isa isa);

    struct KernelTable
    {
        double (*dot)(const double* a, const double* b, std::size_t n);
        double (*sum_squares)(const double* x, std::size_t n);
        // sum_i w[i] * x[i]^2
        double (*weighted_sum_squares)(const double* w, const double* x, std::size_t n);
        // y += alpha * x
        void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
        // a += alpha * v * v^T, a column-major n x n
        void (*rank1_update)(double alpha, const double* v, double* a, std::size_t n);
        // sum_{i<n-1} 100 (x_i^2 - x_{i+1})^2 + (x_i - 1)^2
        double (*rosenbrock)(const double* x, std::size_t n);
    };

    bool isa_available(Isa isa);

    /// Kernel table for a specific ISA. Requesting an unavailable ISA throws.
    const KernelTable& table(Isa isa);

    Isa active_isa();
    const KernelTable& active();

    namespace scalar
    {
        const KernelTable& table();
    }

#if defined(__x86_64__) || defined(_M_X64)
    namespace avx2
    {
        const KernelTable& table();
    }
#endif

    inline double dot(std::span<const double> a, std::span<const double> b)
    {
        return active().dot(a.data(), b.data(), a.size());
    }

    inline double sum_squares(std::span<const double> x)
    {
        return active().sum_squares(x.data(), x.size());
    }

    inline double weighted_sum_squares(std::span<const double> w, std::span<const double> x)
    {
        return active().weighted_sum_squares(w.data(), x.data(), x.size());
    }

    inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
    {
        active().axpy(alpha, x.data(), y.data(), y.size());
    }

    inline void rank1_update(double alpha, std::span<const double> v, std::span<double> a)
    {
        active().rank1_update(alpha, v.data(), a.data(), v.size());
    }

    inline double rosenbrock(std::span<const double> x)
    {
        return active().rosenbrock(x.data(), x.size());
    }
}
