#include "mapcma/cma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "mapcma/errors.hpp"
#include "mapcma/kernels.hpp"

namespace mapcma
{
    namespace
    {
        constexpr std::array<std::pair<Variant, std::string_view>, 3> variant_names{{
            {Variant::CmaEs, "cma-es"},
            {Variant::PureRankMu, "pure-rank-mu"},
            {Variant::MapCma, "map-cma"},
        }};

        std::span<double> span_of(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
        std::span<const double> span_of(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
        std::span<double> span_of(Matrix& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

        // State shared by tell and tell_with_prior: ranking, weighted steps and
        // the updated evolution paths.
        struct PathUpdate
        {
            std::vector<std::size_t> order;
            Vector y_w;       // sum_i w_i y_{i:lambda}
            Vector x_step;    // sum_i w_i (x_{i:lambda} - m)
            Vector p_sigma;   // p_sigma^{(t+1)}
            Vector p_c;       // p_c^{(t+1)}
            double stall = 0; // (1 - h_sigma) c1 c_c (2 - c_c) when h_sigma is enabled
        };

        void check_population(const SearchDistribution& state, const StrategyParams& params, const Population& pop)
        {
            if (pop.size() != params.lambda)
                throw DimensionMismatch("tell: population of " + std::to_string(pop.size()) + " for lambda " +
                                        std::to_string(params.lambda));
            if (state.dim() != params.n)
                throw DimensionMismatch("tell: state dimension does not match strategy parameters");
            if (!pop.fully_evaluated())
                throw std::invalid_argument("tell: population has unevaluated candidates");
            for (const auto& c : pop.entries())
                if (static_cast<std::size_t>(c.x.size()) != params.n || static_cast<std::size_t>(c.y.size()) != params.n)
                    throw DimensionMismatch("tell: candidate dimension mismatch");
        }

        PathUpdate update_paths(const SearchDistribution& state, const StrategyParams& params, const Population& pop)
        {
            check_population(state, params, pop);
            const auto n = static_cast<Eigen::Index>(params.n);
            PathUpdate u;
            u.order = pop.ranking();
            u.y_w = Vector::Zero(n);
            u.x_step = Vector::Zero(n);
            Vector diff(n);
            for (std::size_t i = 0; i < params.weights.mu(); ++i)
            {
                const Candidate& c = pop[u.order[i]];
                kernels::axpy(params.weights[i], span_of(c.y), span_of(u.y_w));
                diff = c.x - state.mean;
                kernels::axpy(params.weights[i], span_of(diff), span_of(u.x_step));
            }

            const SymMatrix inv_sqrt = state.cov_inv_sqrt ? *state.cov_inv_sqrt : inv_sqrt_sym(state.cov).value;
            const double cs = params.c_sigma;
            u.p_sigma = (1.0 - cs) * state.p_sigma +
                        std::sqrt(cs * (2.0 - cs) * params.mu_eff) * (inv_sqrt.matrix() * u.y_w);

            bool h_sigma = true;
            if (params.use_h_sigma)
            {
                const double t1 = static_cast<double>(state.t + 1);
                const double threshold = std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * t1)) *
                                         (1.4 + 2.0 / (static_cast<double>(params.n) + 1.0)) * params.chi_n;
                h_sigma = u.p_sigma.norm() < threshold;
            }
            const double cc = params.c_c;
            u.p_c = (1.0 - cc) * state.p_c;
            if (h_sigma)
                u.p_c += std::sqrt(cc * (2.0 - cc) * params.mu_eff) * u.y_w;
            else
                u.stall = params.c1 * cc * (2.0 - cc);
            return u;
        }

        double next_sigma(const SearchDistribution& state, const StrategyParams& params, const Vector& p_sigma)
        {
            return state.sigma * std::exp((params.c_sigma / params.d_sigma) * (p_sigma.norm() / params.chi_n - 1.0));
        }

        // Symmetrizes, checks PD and caches the decomposition-derived values.
        void finish_covariance(SearchDistribution& next, Matrix cov)
        {
            next.cov = SymMatrix(std::move(cov));
            const EigenDecomposition eig = eigh(next.cov);
            const double min_eig = eig.values(0);
            if (!(min_eig > 0.0) || !eig.values.allFinite())
                throw CovarianceCollapse("tell: covariance lost positive definiteness (min eigenvalue " +
                                         std::to_string(min_eig) + ")");
            next.cov_min_eig = min_eig;
            next.cov_inv_sqrt = inv_sqrt_sym(eig, default_eig_floor(next.cov)).value;
        }

        // Adds c_mu * sum_i w_i y_i y_i^T over the mu best.
        void add_rank_mu(Matrix& cov, const StrategyParams& params, const Population& pop,
                         const std::vector<std::size_t>& order)
        {
            for (std::size_t i = 0; i < params.weights.mu(); ++i)
                kernels::rank1_update(params.c_mu * params.weights[i], span_of(pop[order[i]].y), span_of(cov));
        }

        double weight_sum(const UtilityWeights& w)
        {
            const auto v = w.values();
            return std::accumulate(v.begin(), v.end(), 0.0);
        }
    }

    std::string_view variant_name(Variant v)
    {
        for (const auto& [variant, name] : variant_names)
            if (variant == v)
                return name;
        return "unknown";
    }

    std::optional<Variant> parse_variant(std::string_view name)
    {
        for (const auto& [variant, n] : variant_names)
            if (n == name)
                return variant;
        return std::nullopt;
    }

    SearchDistribution SearchDistribution::initial(Vector mean, double sigma)
    {
        if (!(sigma > 0.0))
            throw InvalidConfig("initial step size must be positive");
        const auto n = mean.size();
        SearchDistribution s;
        s.sigma = sigma;
        s.cov = SymMatrix::identity(static_cast<std::size_t>(n));
        s.p_sigma = Vector::Zero(n);
        s.p_c = Vector::Zero(n);
        s.mean = std::move(mean);
        return s;
    }

    double expected_normal_norm(std::size_t n)
    {
        const auto nd = static_cast<double>(n);
        return std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
    }

    void StrategyParams::validate() const
    {
        if (n < 1 || lambda < 2 || weights.lambda() != lambda)
            throw InvalidConfig("strategy parameters: inconsistent N/lambda/weights");
        if (!(c_sigma > 0.0 && c_sigma <= 1.0))
            throw InvalidConfig("strategy parameters: c_sigma must lie in (0, 1]");
        if (!(c_c > 0.0 && c_c <= 1.0))
            throw InvalidConfig("strategy parameters: c_c must lie in (0, 1]");
        if (!(c1 >= 0.0) || !(c_mu > 0.0) || c1 + c_mu > 1.0 + 1e-12)
            throw InvalidConfig("strategy parameters: need c1 >= 0, c_mu > 0, c1 + c_mu <= 1");
        if (std::abs(mu_eff - weights.mu_eff()) > 1e-12 * mu_eff)
            throw InvalidConfig("strategy parameters: mu_eff does not match the weights");
        if (!(d_sigma > 0.0) || !(chi_n > 0.0))
            throw InvalidConfig("strategy parameters: d_sigma and chi_n must be positive");
        if (variant == Variant::MapCma && !(r > 0.0))
            throw InvalidConfig("strategy parameters: map-cma requires r > 0");
    }

    StrategyParams default_strategy_params(std::size_t n, std::optional<std::size_t> lambda, Variant variant,
                                           std::optional<double> r)
    {
        if (n < 2)
            throw InvalidConfig("dimension must be >= 2, got " + std::to_string(n));
        if (variant == Variant::MapCma && !r)
            throw InvalidConfig("map-cma requires r");
        if (r && !(*r > 0.0))
            throw InvalidConfig("r must be positive");

        const auto nd = static_cast<double>(n);
        StrategyParams p;
        p.n = n;
        p.lambda = lambda.value_or(4 + static_cast<std::size_t>(std::floor(3.0 * std::log(nd))));
        if (p.lambda < 2)
            throw InvalidConfig("lambda must be >= 2, got " + std::to_string(p.lambda));
        p.weights = default_weights(p.lambda);
        const double mu_eff = p.weights.mu_eff();
        p.mu_eff = mu_eff;
        p.c_sigma = (mu_eff + 2.0) / (nd + mu_eff + 5.0);
        p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (nd + 1.0)) - 1.0) + p.c_sigma;
        p.c_c = (4.0 + mu_eff / nd) / (nd + 4.0 + 2.0 * mu_eff / nd);
        p.c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
        p.c_mu = std::min(1.0 - p.c1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nd + 2.0) * (nd + 2.0) + mu_eff));
        if (!(p.c_mu > 0.0))
            throw InvalidConfig("lambda = " + std::to_string(p.lambda) + " gives c_mu = 0; use lambda >= 4");
        p.chi_n = expected_normal_norm(n);
        p.variant = variant;
        p.c_m = 1.0;
        if (variant == Variant::PureRankMu)
            p.c1 = 0.0;
        if (variant == Variant::MapCma)
        {
            p.r = *r;
            p.c_m = 1.0 / (1.0 + p.c1 / (p.c_mu * p.r));
        }
        p.validate();
        return p;
    }

    void Population::set_fitness(std::size_t i, double f)
    {
        entries_.at(i).f = f;
        entries_.at(i).evaluated = true;
    }

    bool Population::fully_evaluated() const
    {
        return std::all_of(entries_.begin(), entries_.end(), [](const Candidate& c) { return c.evaluated; });
    }

    std::vector<std::size_t> Population::ranking() const
    {
        std::vector<std::size_t> order(entries_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        // NaN sorts last.
        std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
            const double fa = entries_[a].f;
            const double fb = entries_[b].f;
            if (std::isnan(fa) || std::isnan(fb))
                return !std::isnan(fa) && std::isnan(fb);
            return fa < fb;
        });
        return order;
    }

    Population ask(const SearchDistribution& state, const StrategyParams& params, RandomStream& rng)
    {
        if (state.dim() != params.n)
            throw DimensionMismatch("ask: state dimension does not match strategy parameters");
        Matrix l;
        try
        {
            l = cholesky(state.cov);
        }
        catch (const NotPositiveDefinite& e)
        {
            throw CovarianceCollapse(std::string("ask: ") + e.what());
        }
        const auto n = static_cast<Eigen::Index>(params.n);
        const auto lower = l.triangularView<Eigen::Lower>();
        std::vector<Candidate> entries(params.lambda);
        Vector z(n);
        for (std::size_t i = 0; i < params.lambda; ++i)
        {
            for (Eigen::Index k = 0; k < n; ++k)
                z(k) = rng.normal();
            Candidate& c = entries[i];
            c.y = lower * z;
            c.x = state.mean + state.sigma * c.y;
            c.index = i;
        }
        return Population(std::move(entries));
    }

    SearchDistribution tell(const SearchDistribution& state, const StrategyParams& params, const Population& pop)
    {
        const PathUpdate u = update_paths(state, params, pop);

        SearchDistribution next;
        next.p_sigma = u.p_sigma;
        next.p_c = u.p_c;
        next.t = state.t + 1;

        Vector step = u.x_step;
        if (params.variant == Variant::MapCma)
            step += (params.c1 / (params.r * params.c_mu)) * state.sigma * u.p_c;
        next.mean = state.mean + params.c_m * step;

        const double c1 = params.variant == Variant::PureRankMu ? 0.0 : params.c1;
        Matrix cov = (1.0 - c1 - params.c_mu * weight_sum(params.weights) + u.stall) * state.cov.matrix();
        if (c1 > 0.0)
            kernels::rank1_update(c1, span_of(u.p_c), span_of(cov));
        add_rank_mu(cov, params, pop, u.order);

        next.sigma = next_sigma(state, params, u.p_sigma);
        finish_covariance(next, std::move(cov));
        return next;
    }

    SearchDistribution tell_with_prior(const SearchDistribution& state, const StrategyParams& params,
                                       const Population& pop, const PriorBuilder& prior_builder)
    {
        const PathUpdate u = update_paths(state, params, pop);
        const NiwPrior prior = prior_builder(state, u.p_c);
        const double sigma2 = state.sigma * state.sigma;
        const NormalParams theta{state.mean, sigma2 * state.cov};
        const ThetaGradient prior_grad = niw_natural_grad(prior, theta);

        SearchDistribution next;
        next.p_sigma = u.p_sigma;
        next.p_c = u.p_c;
        next.t = state.t + 1;
        next.mean = state.mean + params.c_m * (u.x_step + prior_grad.d_mean);

        Matrix cov = (1.0 - params.c_mu * weight_sum(params.weights) + u.stall) * state.cov.matrix();
        add_rank_mu(cov, params, pop, u.order);
        cov += (params.c_mu / sigma2) * prior_grad.d_cov.matrix();

        next.sigma = next_sigma(state, params, u.p_sigma);
        finish_covariance(next, std::move(cov));
        return next;
    }
}
