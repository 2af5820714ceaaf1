#pragma once

// Test-only helpers: random instance generators and independent oracles.
// The oracles use plain nested loops over std::vector and never call into
// the library's update or gradient code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "mapcma/linalg.hpp"

namespace mapcma::testing
{
    using Dense = std::vector<std::vector<double>>;

    inline Dense to_dense(const Matrix& a)
    {
        Dense d(static_cast<std::size_t>(a.rows()), std::vector<double>(static_cast<std::size_t>(a.cols())));
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j);
        return d;
    }

    inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

    /// Componentwise relative error max_i |a_i - b_i| / max(|a_i|, |b_i|); exact zeros count as 0.
    inline double max_rel_err(const double* a, const double* b, std::size_t n)
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
            if (scale == 0.0)
                continue;
            worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
        }
        return worst;
    }

    inline double max_rel_err(const Vector& a, const Vector& b)
    {
        return max_rel_err(a.data(), b.data(), static_cast<std::size_t>(a.size()));
    }

    inline double max_rel_err(const Matrix& a, const Matrix& b)
    {
        return max_rel_err(a.data(), b.data(), static_cast<std::size_t>(a.size()));
    }

    inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

    /// Hand-rolled generator for random instances.
    class Gen
    {
    public:
        explicit Gen(std::uint64_t seed) : engine_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
        double normal() { return std::normal_distribution<double>()(engine_); }
        std::size_t pick(std::size_t lo, std::size_t hi)
        {
            return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
        }

        Vector vector(std::size_t n, double scale = 1.0)
        {
            Vector v(static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v(i) = scale * normal();
            return v;
        }

        /// Random PD matrix B B^T / n + eps I with moderate conditioning.
        SymMatrix pd(std::size_t n, double eps = 0.1)
        {
            const auto k = static_cast<Eigen::Index>(n);
            Matrix b(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    b(i, j) = normal();
            Matrix a = b * b.transpose() / static_cast<double>(n) + eps * Matrix::Identity(k, k);
            return SymMatrix(a);
        }

        std::mt19937_64& engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
    };

    struct MeanCov
    {
        std::vector<double> mean;
        Dense cov;
    };

    /// Term-by-term MAP-IGO step for the normal family with an NIW prior.
    inline MeanCov brute_force_map_igo(const std::vector<double>& m, const Dense& c,
                                       const std::vector<std::vector<double>>& sorted_x, const std::vector<double>& w,
                                       const std::vector<double>& delta, double gamma, const Dense& psi, double nu,
                                       double c_m, double c_mu)
    {
        const std::size_t n = m.size();
        MeanCov out{m, c};
        for (std::size_t a = 0; a < n; ++a)
        {
            double g = 0.0;
            for (std::size_t i = 0; i < sorted_x.size(); ++i)
                g += w[i] * (sorted_x[i][a] - m[a]);
            g += -gamma * (m[a] - delta[a]);
            out.mean[a] = m[a] + c_m * g;
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
            {
                double g = 0.0;
                for (std::size_t i = 0; i < sorted_x.size(); ++i)
                    g += w[i] * ((sorted_x[i][a] - m[a]) * (sorted_x[i][b] - m[b]) - c[a][b]);
                g += gamma * (m[a] - delta[a]) * (m[b] - delta[b]);
                g += psi[a][b];
                g -= (nu + static_cast<double>(n) + 2.0) * c[a][b];
                out.cov[a][b] = c[a][b] + c_mu * g;
            }
        return out;
    }

    /// CMA rank-one + rank-mu update with the momentum term on the mean:
    ///   m' = m + c_m (sum w_i (x_i - m) + c1/(r c_mu) sigma p_c)
    ///   C' = C + c_mu sum w_i (y_i y_i^T - C) + c1 (p_c p_c^T - C)
    inline MeanCov closed_form_rank_one(const std::vector<double>& m, double sigma, const Dense& c,
                                        const std::vector<double>& p_c, const std::vector<std::vector<double>>& sorted_x,
                                        const std::vector<double>& w, double c_m, double c1, double c_mu, double r)
    {
        const std::size_t n = m.size();
        MeanCov out{m, c};
        for (std::size_t a = 0; a < n; ++a)
        {
            double g = 0.0;
            for (std::size_t i = 0; i < sorted_x.size(); ++i)
                g += w[i] * (sorted_x[i][a] - m[a]);
            out.mean[a] = m[a] + c_m * (g + c1 / (r * c_mu) * sigma * p_c[a]);
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
            {
                double rank_mu = 0.0;
                for (std::size_t i = 0; i < sorted_x.size(); ++i)
                {
                    const double ya = (sorted_x[i][a] - m[a]) / sigma;
                    const double yb = (sorted_x[i][b] - m[b]) / sigma;
                    rank_mu += w[i] * (ya * yb - c[a][b]);
                }
                out.cov[a][b] = c[a][b] + c_mu * rank_mu + c1 * (p_c[a] * p_c[b] - c[a][b]);
            }
        return out;
    }

    inline double max_rel_err(const std::vector<double>& a, const Vector& b)
    {
        return max_rel_err(a.data(), b.data(), a.size());
    }

    inline double max_rel_err(const Dense& a, const Matrix& b)
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
            {
                const double x = a[i][j];
                const double y = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                const double scale = std::max(std::abs(x), std::abs(y));
                if (scale > 0.0)
                    worst = std::max(worst, std::abs(x - y) / scale);
            }
        return worst;
    }
}
