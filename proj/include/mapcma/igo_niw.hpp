#pragma once

// Natural-gradient building blocks for information geometric optimization
// over multivariate normals, with a normal-inverse-Wishart prior on (m, C).
//
// Gradients are kept in block form (mean vector, symmetric matrix) rather
// than as a flattened vec(C); the covariance block is the gradient with
// respect to an unconstrained matrix argument, so a symmetric perturbation
// of entries (i, j) and (j, i) by h changes the log-density by 2 h G(i, j)
// off the diagonal.

#include <cstddef>
#include <span>
#include <vector>

#include "mapcma/linalg.hpp"

namespace mapcma
{
    struct NormalParams
    {
        Vector mean;
        SymMatrix cov;

        [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
    };

    /// Normal-inverse-Wishart parameters:
    /// p(m, C) = N(m | delta, C / gamma) * W^-1(C | psi, nu).
    struct NiwPrior
    {
        Vector delta;
        double gamma = 1.0;
        SymMatrix psi;
        double nu = 0.0;

        [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(delta.size()); }

        /// Throws InvalidPrior unless gamma > 0, nu > N - 1 and psi is PD.
        void validate() const;
    };

    struct ThetaGradient
    {
        Vector d_mean;
        SymMatrix d_cov;
    };

    /// Rank-indexed recombination weights: w[0] >= ... >= w[mu-1] > 0,
    /// zero beyond mu, positive part summing to one.
    class UtilityWeights
    {
    public:
        /// Validates the ordering/positivity/normalization contract; throws
        /// InvalidConfig on violation (sum tolerance 1e-12).
        explicit UtilityWeights(std::vector<double> w);

        [[nodiscard]] std::size_t lambda() const { return w_.size(); }
        [[nodiscard]] std::size_t mu() const { return mu_; }
        [[nodiscard]] double operator[](std::size_t i) const { return w_[i]; }
        [[nodiscard]] std::span<const double> values() const { return w_; }
        /// 1 / sum w_i^2
        [[nodiscard]] double mu_eff() const;

    private:
        std::vector<double> w_;
        std::size_t mu_ = 0;
    };

    /// Log-rank weights: mu = floor(lambda/2), w'_i = ln((lambda+1)/2) - ln i,
    /// normalized to sum one.
    UtilityWeights default_weights(std::size_t lambda);

    /// Natural gradient of ln N(x | m, C): (x - m, (x - m)(x - m)^T - C).
    ThetaGradient natural_grad_loglik_normal(const NormalParams& theta, std::span<const double> x);

    double niw_logpdf(const NiwPrior& prior, const NormalParams& theta);
    ThetaGradient niw_vanilla_grad(const NiwPrior& prior, const NormalParams& theta);

    /// Applies F^-1(theta) = blockdiag(C, 2 C (x) C) in matrix form:
    /// (C g_m, 2 C G_C C).
    ThetaGradient apply_inverse_fisher(const NormalParams& theta, const ThetaGradient& g);

    ThetaGradient niw_natural_grad(const NiwPrior& prior, const NormalParams& theta);

    /// One MAP-IGO step for the normal family with an NIW prior:
    ///   m' = m + c_m (sum_i w_i (x_i - m) - gamma (m - delta))
    ///   C' = C + c_mu (sum_i w_i ((x_i - m)(x_i - m)^T - C)
    ///                  + gamma (m - delta)(m - delta)^T + psi - (nu + N + 2) C)
    /// `sorted_samples` must be ordered best first and have one entry per
    /// weight. Throws CovarianceCollapse if C' is not positive definite.
    NormalParams map_igo_update(const NormalParams& theta, std::span<const Vector> sorted_samples,
                                const UtilityWeights& weights, const NiwPrior& prior, double c_m, double c_mu);

    /// Prior whose MAP-IGO step reproduces the CMA rank-one update plus a
    /// momentum term on the mean, when applied to (m, sigma^2 C):
    ///   delta = m + r sigma p_c,  gamma = c1 / (r^2 c_mu),
    ///   psi = (nu + N + 2 - c1 / c_mu) sigma^2 C.
    /// Throws InvalidPrior when psi's coefficient is not positive or the
    /// arguments are out of range.
    NiwPrior rank_one_prior(const Vector& mean, double sigma, const SymMatrix& cov, const Vector& p_c_next, double r,
                            double c1, double c_mu, double nu);

    /// nu = N + 2, the default degrees of freedom.
    double default_nu(std::size_t dim);
}
