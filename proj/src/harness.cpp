#include "mapcma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "mapcma/errors.hpp"

namespace mapcma
{
    RSetting RSetting::literal(double value)
    {
        if (!(value > 0.0) || !std::isfinite(value))
            throw InvalidConfig(fmt::format("r must be a positive finite number, got {}", value));
        return RSetting(Kind::Literal, value);
    }

    std::optional<RSetting> RSetting::parse(std::string_view text)
    {
        if (text == "1")
            return one();
        if (text == "sqrt-n")
            return sqrt_n();
        if (text == "n")
            return n();
        double value = 0.0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc() || ptr != end || !(value > 0.0) || !std::isfinite(value))
            return std::nullopt;
        return RSetting(Kind::Literal, value);
    }

    double RSetting::resolve(std::size_t dim) const
    {
        switch (kind_)
        {
        case Kind::One:
            return 1.0;
        case Kind::SqrtN:
            return std::sqrt(static_cast<double>(dim));
        case Kind::N:
            return static_cast<double>(dim);
        case Kind::Literal:
            break;
        }
        return value_;
    }

    std::string RSetting::to_string() const
    {
        switch (kind_)
        {
        case Kind::One:
            return "1";
        case Kind::SqrtN:
            return "sqrt-n";
        case Kind::N:
            return "n";
        case Kind::Literal:
            break;
        }
        return fmt::format("{}", value_);
    }

    std::uint64_t TrialConfig::resolved_max_evals() const
    {
        return max_evals.value_or(static_cast<std::uint64_t>(1000000) * dim);
    }

    StrategyParams TrialConfig::strategy() const
    {
        std::optional<double> r_value;
        if (r)
            r_value = r->resolve(dim);
        StrategyParams p = default_strategy_params(dim, lambda, variant, variant == Variant::MapCma ? r_value : std::nullopt);
        p.use_h_sigma = use_h_sigma;
        return p;
    }

    void TrialConfig::validate() const
    {
        if (dim < 2)
            throw InvalidConfig(fmt::format("dim must be >= 2, got {}", dim));
        if (!(target_f > 0.0))
            throw InvalidConfig("target must be positive");
        if (!(min_eig_threshold >= 0.0))
            throw InvalidConfig("minimum eigenvalue threshold must be non-negative");
        if (variant == Variant::MapCma && !r)
            throw InvalidConfig("variant map-cma requires r");
        const StrategyParams p = strategy();
        if (resolved_max_evals() < p.lambda)
            throw InvalidConfig(fmt::format("max evaluations {} is below lambda {}", resolved_max_evals(), p.lambda));
    }

    std::string_view termination_name(Termination t)
    {
        switch (t)
        {
        case Termination::TargetReached:
            return "target-reached";
        case Termination::BudgetExhausted:
            return "budget-exhausted";
        case Termination::EigenvalueCollapse:
            return "eigenvalue-collapse";
        case Termination::CovarianceCollapse:
            return "covariance-collapse";
        }
        return "unknown";
    }

    TrialResult run_trial(const TrialConfig& cfg)
    {
        cfg.validate();
        const Objective objective(cfg.function, cfg.dim);
        const StrategyParams params = cfg.strategy();
        RandomStream rng(cfg.seed);

        const InitBox box = objective.init_box();
        Vector mean(static_cast<Eigen::Index>(cfg.dim));
        for (Eigen::Index i = 0; i < mean.size(); ++i)
            mean(i) = rng.uniform(box.lower, box.upper);
        SearchDistribution state = SearchDistribution::initial(std::move(mean), (box.upper - box.lower) / 2.0);

        EvalBudgetCounter budget(cfg.resolved_max_evals());
        const std::size_t trace_stride = cfg.dim <= 20 ? 1 : 5;

        TrialResult result;
        result.seed = cfg.seed;
        result.best_f = std::numeric_limits<double>::infinity();

        auto finish = [&](Termination reason) {
            result.termination = reason;
            result.success = reason == Termination::TargetReached;
            result.evaluations = budget.count();
            if (cfg.record_trace && (result.trace.empty() || result.trace.back().evaluations != budget.count()))
                result.trace.push_back({budget.count(), result.best_f});
            return result;
        };

        for (std::size_t generation = 0;; ++generation)
        {
            if (!budget.charge(params.lambda))
                return finish(Termination::BudgetExhausted);

            Population pop;
            try
            {
                pop = ask(state, params, rng);
            }
            catch (const CovarianceCollapse&)
            {
                return finish(Termination::CovarianceCollapse);
            }
            for (std::size_t i = 0; i < pop.size(); ++i)
            {
                const Vector& x = pop[i].x;
                const double f = objective.evaluate({x.data(), static_cast<std::size_t>(x.size())});
                pop.set_fitness(i, f);
                result.best_f = std::min(result.best_f, f);
            }
            if (cfg.record_trace && generation % trace_stride == 0)
                result.trace.push_back({budget.count(), result.best_f});

            if (result.best_f < cfg.target_f)
                return finish(Termination::TargetReached);

            try
            {
                state = tell(state, params, pop);
            }
            catch (const CovarianceCollapse&)
            {
                return finish(Termination::CovarianceCollapse);
            }
            const double min_eig = state.sigma * state.sigma * state.cov_min_eig.value_or(min_eigenvalue(state.cov));
            if (min_eig < cfg.min_eig_threshold)
                return finish(Termination::EigenvalueCollapse);
        }
    }

    std::optional<double> sp1(std::span<const TrialResult> results)
    {
        if (results.empty())
            return std::nullopt;
        std::size_t successes = 0;
        double evals = 0.0;
        for (const auto& r : results)
            if (r.success)
            {
                ++successes;
                evals += static_cast<double>(r.evaluations);
            }
        if (successes == 0)
            return std::nullopt;
        const double mean_evals = evals / static_cast<double>(successes);
        const double rate = static_cast<double>(successes) / static_cast<double>(results.size());
        return mean_evals / rate;
    }

    ExperimentSummary summarize(std::vector<TrialResult> results)
    {
        ExperimentSummary s;
        s.n_trials = results.size();
        std::size_t successes = 0;
        double evals = 0.0;
        for (const auto& r : results)
            if (r.success)
            {
                ++successes;
                evals += static_cast<double>(r.evaluations);
            }
        if (s.n_trials > 0)
            s.success_rate = static_cast<double>(successes) / static_cast<double>(s.n_trials);
        if (successes > 0)
            s.mean_success_evals = evals / static_cast<double>(successes);
        s.sp1 = sp1(results);
        s.trials = std::move(results);
        return s;
    }

    std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t index)
    {
        return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1));
    }

    std::size_t default_parallelism()
    {
        if (const char* env = std::getenv("MAPCMA_THREADS"))
        {
            const std::string_view text(env);
            std::size_t value = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec == std::errc() && ptr == text.data() + text.size() && value > 0)
                return value;
        }
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }

    ExperimentSummary run_experiment(const TrialConfig& cfg, std::size_t n_trials, std::uint64_t base_seed,
                                     std::size_t parallelism)
    {
        if (n_trials < 1)
            throw InvalidConfig("n_trials must be >= 1");
        cfg.validate();

        std::vector<TrialResult> results(n_trials);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1))
            {
                TrialConfig trial = cfg;
                trial.seed = trial_seed(base_seed, i);
                results[i] = run_trial(trial);
            }
        };

        const std::size_t width = std::clamp<std::size_t>(parallelism, 1, n_trials);
        if (width == 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            pool.reserve(width);
            for (std::size_t t = 0; t < width; ++t)
                pool.emplace_back(worker);
        }
        return summarize(std::move(results));
    }
}
