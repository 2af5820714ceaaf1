#pragma once

// Ask/tell CMA-ES with three update variants:
//   CmaEs       mean + rank-one + rank-mu covariance update, CSA step size
//   PureRankMu  mean + rank-mu only (c1 = 0), CSA step size
//   MapCma      CmaEs plus the momentum term (c1 / (r c_mu)) sigma p_c on the mean
//
// A single SearchDistribution is single-writer; tell returns the successor
// state by value.

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "mapcma/igo_niw.hpp"
#include "mapcma/linalg.hpp"
#include "mapcma/random.hpp"

namespace mapcma
{
    enum class Variant
    {
        CmaEs,
        PureRankMu,
        MapCma,
    };

    /// "cma-es", "pure-rank-mu", "map-cma"
    std::string_view variant_name(Variant v);
    std::optional<Variant> parse_variant(std::string_view name);

    struct SearchDistribution
    {
        Vector mean;
        double sigma = 1.0;
        SymMatrix cov;
        Vector p_sigma;
        Vector p_c;
        std::size_t t = 0;

        /// cov^{-1/2}, filled in by tell for the successor state.
        std::optional<SymMatrix> cov_inv_sqrt;
        /// Smallest eigenvalue of cov, filled in alongside cov_inv_sqrt.
        std::optional<double> cov_min_eig;

        /// C = I, zero paths, t = 0.
        static SearchDistribution initial(Vector mean, double sigma);

        [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
    };

    struct StrategyParams
    {
        std::size_t n = 0;
        std::size_t lambda = 0;
        UtilityWeights weights{std::vector<double>{1.0}};
        double mu_eff = 1.0;
        double c_m = 1.0;
        double c_sigma = 0.0;
        double d_sigma = 0.0;
        double c_c = 0.0;
        double c1 = 0.0;
        double c_mu = 0.0;
        double chi_n = 0.0;
        Variant variant = Variant::CmaEs;
        double r = 0.0; // MapCma only
        bool use_h_sigma = false;

        /// Throws InvalidConfig when the learning-rate invariants do not hold.
        void validate() const;
    };

    /// Canonical defaults: lambda = 4 + floor(3 ln N), log-rank weights and the
    /// usual c_sigma/d_sigma/c_c/c1/c_mu constants. MapCma uses
    /// c_m = 1 / (1 + c1 / (c_mu r)) so that c_m + c_m c1 / (r c_mu) = 1.
    StrategyParams default_strategy_params(std::size_t n, std::optional<std::size_t> lambda, Variant variant,
                                           std::optional<double> r = std::nullopt);

    /// E||N(0, I)|| ~ sqrt(N) (1 - 1/(4N) + 1/(21 N^2))
    double expected_normal_norm(std::size_t n);

    struct Candidate
    {
        Vector y;
        Vector x;
        double f = 0.0;
        bool evaluated = false;
        std::size_t index = 0;
    };

    class Population
    {
    public:
        Population() = default;
        explicit Population(std::vector<Candidate> entries) : entries_(std::move(entries)) {}

        [[nodiscard]] std::size_t size() const { return entries_.size(); }
        [[nodiscard]] const Candidate& operator[](std::size_t i) const { return entries_[i]; }
        [[nodiscard]] const std::vector<Candidate>& entries() const { return entries_; }

        void set_fitness(std::size_t i, double f);
        [[nodiscard]] bool fully_evaluated() const;

        /// Indices ordered by f ascending, ties broken by original index.
        [[nodiscard]] std::vector<std::size_t> ranking() const;

    private:
        std::vector<Candidate> entries_;
    };

    /// Draws lambda candidates y_i = L z_i, x_i = m + sigma y_i with L the
    /// Cholesky factor of C. Throws CovarianceCollapse if C is not PD.
    Population ask(const SearchDistribution& state, const StrategyParams& params, RandomStream& rng);

    /// One generation update. Throws CovarianceCollapse if the new covariance
    /// is not positive definite.
    SearchDistribution tell(const SearchDistribution& state, const StrategyParams& params, const Population& pop);

    /// Builds the prior from the current state and the freshly updated
    /// evolution path p_c^{(t+1)}.
    using PriorBuilder = std::function<NiwPrior(const SearchDistribution& state, const Vector& p_c_next)>;

    /// Generic prior-driven update: paths and step size as in tell, but the
    /// mean and covariance follow the MAP-IGO step applied to (m, sigma^2 C)
    /// with the supplied NIW prior, i.e. the prior's natural gradient divided
    /// by sigma^2 in the covariance block. No separate rank-one term is
    /// added; a prior from rank_one_prior supplies it.
    SearchDistribution tell_with_prior(const SearchDistribution& state, const StrategyParams& params,
                                       const Population& pop, const PriorBuilder& prior_builder);
}
