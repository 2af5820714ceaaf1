#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapcma/cma.hpp"
#include "mapcma/objectives.hpp"

namespace mapcma
{
    /// Momentum radius r, either a literal or relative to the dimension.
    class RSetting
    {
    public:
        enum class Kind
        {
            Literal,
            One,
            SqrtN,
            N,
        };

        static RSetting literal(double value);
        static RSetting one() { return RSetting(Kind::One, 1.0); }
        static RSetting sqrt_n() { return RSetting(Kind::SqrtN, 0.0); }
        static RSetting n() { return RSetting(Kind::N, 0.0); }

        /// Accepts "1", "sqrt-n", "n" or a positive numeric literal.
        static std::optional<RSetting> parse(std::string_view text);

        [[nodiscard]] double resolve(std::size_t dim) const;
        [[nodiscard]] std::string to_string() const;
        [[nodiscard]] Kind kind() const { return kind_; }

    private:
        RSetting(Kind kind, double value) : kind_(kind), value_(value) {}
        Kind kind_;
        double value_;
    };

    struct TrialConfig
    {
        Function function = Function::Sphere;
        std::size_t dim = 10;
        Variant variant = Variant::CmaEs;
        std::optional<RSetting> r;
        std::optional<std::size_t> lambda;
        double target_f = 1e-10;
        /// Defaults to 10^6 * dim.
        std::optional<std::uint64_t> max_evals;
        double min_eig_threshold = 1e-30;
        std::uint64_t seed = 0;
        bool use_h_sigma = false;
        bool record_trace = false;

        [[nodiscard]] std::uint64_t resolved_max_evals() const;
        [[nodiscard]] StrategyParams strategy() const;
        /// Throws InvalidConfig on an inconsistent configuration.
        void validate() const;
    };

    enum class Termination
    {
        TargetReached,
        BudgetExhausted,
        EigenvalueCollapse,
        CovarianceCollapse,
    };

    std::string_view termination_name(Termination t);

    struct TracePoint
    {
        std::uint64_t evaluations;
        double best_f;
    };

    struct TrialResult
    {
        bool success = false;
        std::uint64_t evaluations = 0;
        double best_f = 0.0;
        Termination termination = Termination::BudgetExhausted;
        std::uint64_t seed = 0;
        std::vector<TracePoint> trace;
    };

    /// One seeded optimization run under the benchmark protocol: m0 uniform
    /// in the init box, sigma0 = (b - a) / 2, C0 = I. Every generation is
    /// evaluated in full and all lambda evaluations are counted. Stops on
    /// best_f < target, on min_eig(sigma^2 C) < threshold, or before a
    /// generation that would exceed the evaluation budget.
    TrialResult run_trial(const TrialConfig& cfg);

    struct ExperimentSummary
    {
        std::size_t n_trials = 0;
        double success_rate = 0.0;
        std::optional<double> sp1;
        std::optional<double> mean_success_evals;
        std::vector<TrialResult> trials;
    };

    /// Mean evaluations of successful trials divided by the success rate;
    /// empty when nothing succeeded.
    std::optional<double> sp1(std::span<const TrialResult> results);

    ExperimentSummary summarize(std::vector<TrialResult> results);

    /// Seed of trial i: splitmix64(base_seed + golden-ratio increment * (i + 1)).
    std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t index);

    /// MAPCMA_THREADS if set and positive, otherwise hardware concurrency.
    std::size_t default_parallelism();

    /// Runs n_trials independent trials on `parallelism` worker threads.
    /// Trial i always uses trial_seed(base_seed, i) and lands in slot i, so
    /// the summary does not depend on the thread count.
    ExperimentSummary run_experiment(const TrialConfig& cfg, std::size_t n_trials, std::uint64_t base_seed,
                                     std::size_t parallelism);
}
