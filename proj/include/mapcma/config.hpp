#pragma once

// Flat key/value experiment files (a TOML subset):
//
//   # comment
//   function = ["sphere", "ellipsoid"]   # arrays expand into a sweep grid
//   dim      = [10, 20]
//   variant  = ["cma-es", "map-cma"]
//   r        = ["1", "sqrt-n", "n"]      # only used by map-cma cells
//   lambda.10 = 700                       # per-dimension population override
//   trials   = 100
//   seed     = 42
//   target   = 1e-10
//   max-evals-factor = 1000000           # budget = factor * dim
//   h-sigma  = false
//
// Values are bare tokens, double-quoted strings or single-line arrays.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapcma/errors.hpp"
#include "mapcma/harness.hpp"

namespace mapcma
{
    class ConfigError : public InvalidConfig
    {
    public:
        ConfigError(std::size_t line, const std::string& message, const std::string& source = {});
        [[nodiscard]] std::size_t line() const { return line_; }
        [[nodiscard]] const std::string& detail() const { return detail_; }

    private:
        std::size_t line_;
        std::string detail_;
    };

    class FlatConfig
    {
    public:
        struct Entry
        {
            std::vector<std::string> values;
            bool is_array = false;
            std::size_t line = 0;
        };

        static FlatConfig parse(std::string_view text);
        static FlatConfig load(const std::filesystem::path& path);

        [[nodiscard]] const Entry* find(const std::string& key) const;
        [[nodiscard]] const std::map<std::string, Entry>& entries() const { return entries_; }

    private:
        std::map<std::string, Entry> entries_;
    };

    /// One experiment: a trial configuration plus trial count and base seed.
    struct ExperimentSpec
    {
        TrialConfig trial;
        std::size_t trials = 100;
        std::uint64_t base_seed = 0;
        /// Evaluation budget as a multiple of the dimension; overrides trial.max_evals.
        std::optional<std::uint64_t> max_evals_factor;

        /// trial with the budget factor applied.
        [[nodiscard]] TrialConfig resolved_trial() const;
    };

    /// Overlays the file's scalar values onto `spec`. Arrays are rejected.
    void apply_config(const FlatConfig& config, ExperimentSpec& spec);

    /// Expands the grid function x dim x variant (x r for map-cma) in file order.
    std::vector<ExperimentSpec> expand_sweep(const FlatConfig& config);
}
