#include "mapcma/igo_niw.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mapcma/errors.hpp"
#include "mapcma/kernels.hpp"

namespace mapcma
{
    namespace
    {
        std::span<double> span_of(Matrix& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }
        std::span<double> span_of(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
        std::span<const double> span_of(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

        void require_dim(std::size_t expected, std::size_t got, const char* what)
        {
            if (expected != got)
                throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                                        ", got " + std::to_string(got));
        }

        void require_same_dims(const NiwPrior& prior, const NormalParams& theta)
        {
            require_dim(theta.dim(), theta.cov.dim(), "theta covariance");
            require_dim(theta.dim(), prior.dim(), "prior delta");
            require_dim(theta.dim(), prior.psi.dim(), "prior psi");
        }

        double log_det_from_cholesky(const Matrix& l)
        {
            return 2.0 * l.diagonal().array().log().sum();
        }

        // ln Gamma_N(a) = N(N-1)/4 ln(pi) + sum_{j=1}^N ln Gamma(a + (1 - j)/2)
        double log_multivariate_gamma(std::size_t n, double a)
        {
            const auto nd = static_cast<double>(n);
            double s = nd * (nd - 1.0) / 4.0 * std::log(std::numbers::pi);
            for (std::size_t j = 1; j <= n; ++j)
                s += std::lgamma(a + (1.0 - static_cast<double>(j)) / 2.0);
            return s;
        }
    }

    void NiwPrior::validate() const
    {
        const std::size_t n = dim();
        if (n == 0 || psi.dim() != n)
            throw InvalidPrior("NIW prior dimensions are inconsistent");
        if (!(gamma > 0.0))
            throw InvalidPrior("NIW prior requires gamma > 0, got " + std::to_string(gamma));
        if (!(nu > static_cast<double>(n) - 1.0))
            throw InvalidPrior("NIW prior requires nu > N - 1, got " + std::to_string(nu));
        try
        {
            (void)cholesky(psi);
        }
        catch (const NotPositiveDefinite&)
        {
            throw InvalidPrior("NIW prior scale matrix psi is not positive definite");
        }
    }

    UtilityWeights::UtilityWeights(std::vector<double> w) : w_(std::move(w))
    {
        if (w_.empty())
            throw InvalidConfig("utility weights must be non-empty");
        while (mu_ < w_.size() && w_[mu_] > 0.0)
            ++mu_;
        if (mu_ == 0)
            throw InvalidConfig("utility weights need at least one positive weight");
        for (std::size_t i = 1; i < mu_; ++i)
            if (w_[i] > w_[i - 1])
                throw InvalidConfig("utility weights must be non-increasing");
        for (std::size_t i = mu_; i < w_.size(); ++i)
            if (w_[i] != 0.0)
                throw InvalidConfig("utility weights beyond mu must be exactly zero");
        const double total = std::accumulate(w_.begin(), w_.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-12)
            throw InvalidConfig("utility weights must sum to one, got " + std::to_string(total));
    }

    double UtilityWeights::mu_eff() const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < mu_; ++i)
            s += w_[i] * w_[i];
        return 1.0 / s;
    }

    UtilityWeights default_weights(std::size_t lambda)
    {
        if (lambda < 2)
            throw InvalidConfig("population size must be >= 2, got " + std::to_string(lambda));
        const std::size_t mu = lambda / 2;
        std::vector<double> w(lambda, 0.0);
        const double base = std::log((static_cast<double>(lambda) + 1.0) / 2.0);
        double total = 0.0;
        for (std::size_t i = 0; i < mu; ++i)
        {
            w[i] = base - std::log(static_cast<double>(i + 1));
            total += w[i];
        }
        for (std::size_t i = 0; i < mu; ++i)
            w[i] /= total;
        return UtilityWeights(std::move(w));
    }

    ThetaGradient natural_grad_loglik_normal(const NormalParams& theta, std::span<const double> x)
    {
        require_dim(theta.dim(), x.size(), "sample");
        const Vector diff = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())) - theta.mean;
        Matrix d_cov = -theta.cov.matrix();
        kernels::rank1_update(1.0, span_of(diff), span_of(d_cov));
        return {diff, SymMatrix(std::move(d_cov))};
    }

    double niw_logpdf(const NiwPrior& prior, const NormalParams& theta)
    {
        require_same_dims(prior, theta);
        const std::size_t n = theta.dim();
        const auto nd = static_cast<double>(n);
        const Matrix l_cov = cholesky(theta.cov);
        const Matrix l_psi = cholesky(prior.psi);
        const double log_det_cov = log_det_from_cholesky(l_cov);
        const double log_det_psi = log_det_from_cholesky(l_psi);

        const Vector diff = theta.mean - prior.delta;
        const Vector whitened = l_cov.triangularView<Eigen::Lower>().solve(diff);
        const double mahalanobis = whitened.squaredNorm();
        const double log_normal = 0.5 * nd * std::log(prior.gamma / (2.0 * std::numbers::pi)) - 0.5 * log_det_cov -
                                  0.5 * prior.gamma * mahalanobis;

        Eigen::LLT<Matrix> llt(theta.cov.matrix());
        const double trace_psi_cinv = llt.solve(prior.psi.matrix()).trace();
        const double log_inv_wishart = 0.5 * prior.nu * log_det_psi - 0.5 * prior.nu * nd * std::numbers::ln2 -
                                       log_multivariate_gamma(n, 0.5 * prior.nu) -
                                       0.5 * (prior.nu + nd + 1.0) * log_det_cov - 0.5 * trace_psi_cinv;
        return log_normal + log_inv_wishart;
    }

    ThetaGradient niw_vanilla_grad(const NiwPrior& prior, const NormalParams& theta)
    {
        require_same_dims(prior, theta);
        const auto nd = static_cast<double>(theta.dim());
        (void)cholesky(theta.cov);
        Eigen::LLT<Matrix> llt(theta.cov.matrix());
        const auto n = static_cast<Eigen::Index>(theta.dim());
        const Matrix c_inv = llt.solve(Matrix::Identity(n, n));
        const Vector cinv_diff = c_inv * (theta.mean - prior.delta);

        Matrix d_cov = prior.gamma * cinv_diff * cinv_diff.transpose() - (prior.nu + nd + 2.0) * c_inv +
                       c_inv * prior.psi.matrix() * c_inv;
        d_cov *= 0.5;
        return {-prior.gamma * cinv_diff, SymMatrix(std::move(d_cov))};
    }

    ThetaGradient apply_inverse_fisher(const NormalParams& theta, const ThetaGradient& g)
    {
        require_dim(theta.dim(), static_cast<std::size_t>(g.d_mean.size()), "gradient mean block");
        require_dim(theta.dim(), g.d_cov.dim(), "gradient covariance block");
        const Matrix& c = theta.cov.matrix();
        Vector d_mean = c * g.d_mean;
        Matrix d_cov = 2.0 * c * g.d_cov.matrix() * c;
        return {std::move(d_mean), SymMatrix(std::move(d_cov))};
    }

    ThetaGradient niw_natural_grad(const NiwPrior& prior, const NormalParams& theta)
    {
        require_same_dims(prior, theta);
        const auto nd = static_cast<double>(theta.dim());
        Vector diff = theta.mean - prior.delta;
        Matrix d_cov = prior.psi.matrix() - (prior.nu + nd + 2.0) * theta.cov.matrix();
        kernels::rank1_update(prior.gamma, span_of(diff), span_of(d_cov));
        return {-prior.gamma * diff, SymMatrix(std::move(d_cov))};
    }

    NormalParams map_igo_update(const NormalParams& theta, std::span<const Vector> sorted_samples,
                                const UtilityWeights& weights, const NiwPrior& prior, double c_m, double c_mu)
    {
        require_same_dims(prior, theta);
        if (sorted_samples.size() != weights.lambda())
            throw DimensionMismatch("map_igo_update: " + std::to_string(sorted_samples.size()) + " samples for " +
                                    std::to_string(weights.lambda()) + " weights");
        const std::size_t n = theta.dim();

        // Likelihood part: sum_i w_i * natural_grad_loglik_normal(theta, x_i).
        Vector grad_mean = Vector::Zero(static_cast<Eigen::Index>(n));
        Matrix grad_cov = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        double weight_total = 0.0;
        Vector diff(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < weights.mu(); ++i)
        {
            require_dim(n, static_cast<std::size_t>(sorted_samples[i].size()), "sample");
            diff = sorted_samples[i] - theta.mean;
            kernels::axpy(weights[i], span_of(diff), span_of(grad_mean));
            kernels::rank1_update(weights[i], span_of(diff), span_of(grad_cov));
            weight_total += weights[i];
        }
        grad_cov -= weight_total * theta.cov.matrix();

        const ThetaGradient prior_grad = niw_natural_grad(prior, theta);

        Vector mean = theta.mean + c_m * (grad_mean + prior_grad.d_mean);
        Matrix cov = theta.cov.matrix() + c_mu * (grad_cov + prior_grad.d_cov.matrix());
        NormalParams next{std::move(mean), SymMatrix(std::move(cov))};
        if (!(min_eigenvalue(next.cov) > 0.0))
            throw CovarianceCollapse("map_igo_update: updated covariance is not positive definite");
        return next;
    }

    NiwPrior rank_one_prior(const Vector& mean, double sigma, const SymMatrix& cov, const Vector& p_c_next, double r,
                            double c1, double c_mu, double nu)
    {
        const std::size_t n = static_cast<std::size_t>(mean.size());
        require_dim(n, cov.dim(), "covariance");
        require_dim(n, static_cast<std::size_t>(p_c_next.size()), "evolution path");
        if (!(r > 0.0))
            throw InvalidPrior("rank-one prior requires r > 0");
        if (!(sigma > 0.0))
            throw InvalidPrior("rank-one prior requires sigma > 0");
        if (!(c_mu > 0.0) || !(c1 > 0.0))
            throw InvalidPrior("rank-one prior requires c1 > 0 and c_mu > 0");
        if (!(nu > static_cast<double>(n) - 1.0))
            throw InvalidPrior("rank-one prior requires nu > N - 1");
        const double psi_coeff = nu + static_cast<double>(n) + 2.0 - c1 / c_mu;
        if (!(psi_coeff > 0.0))
            throw InvalidPrior("rank-one prior: nu + N + 2 - c1/c_mu must be positive, got " +
                               std::to_string(psi_coeff));

        NiwPrior prior;
        prior.delta = mean + (r * sigma) * p_c_next;
        prior.gamma = c1 / (r * r * c_mu);
        prior.psi = (psi_coeff * sigma * sigma) * cov;
        prior.nu = nu;
        return prior;
    }

    double default_nu(std::size_t dim)
    {
        return static_cast<double>(dim) + 2.0;
    }
}
